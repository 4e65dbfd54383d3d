#pragma once

// Persistence and export: run configs, versioned JSON checkpoints of the
// pruning state, tree files, CSV exports and report bundles.
//
// Every exact number is written as a "num/den" string. Object keys keep
// insertion order, so output bytes depend only on the inputs.

#include "badapprox/errors.hpp"
#include "badapprox/mass.hpp"
#include "badapprox/pruning.hpp"
#include "badapprox/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace badapprox::io {

using Json = nlohmann::ordered_json;

inline constexpr int kCheckpointVersion = 1;
inline constexpr int kTreeVersion = 1;
inline constexpr int kReportVersion = 1;

std::string tool_version();

/// Raised for unreadable or incompatible files.
class FormatError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    ConstructionParams params;
    std::optional<RationalVec> seed_center;
    std::optional<Rational> seed_radius;
    unsigned depth = 3;  // maxStage for build, tree depth for subset
    Rational epsilon{1, 10};
    std::optional<Integer> q_cap;
    std::optional<std::uint64_t> rng_seed;
    std::uint64_t samples = 0;  // 0: the per-suite default
    unsigned simplex_q = 8;
    GPolicy policy = GPolicy::Enforce;
    bool lazy = false;  // build: skip the exhaustive removal enumeration
    std::vector<std::string> which;
    std::string scales = "2^-4..2^-12";
    std::string out = "out";

    Json to_json() const;
    /// Unknown keys are rejected.
    static RunConfig from_json(const Json& j);
};

/// "c1,...,cd;r".
std::pair<RationalVec, Rational> parse_seed_ball(std::string_view text);
std::string format_seed_ball(const RationalVec& c, const Rational& r);

/// "2^-lo..2^-hi" -> the exponents lo..hi (lo <= hi).
std::pair<unsigned, unsigned> parse_scale_spec(std::string_view text);

Json to_json(const ConstructionParams& p);
ConstructionParams params_from_json(const Json& j);
Json to_json(const GridCube& c);
GridCube cube_from_json(const Json& j);

/// Marks every stage fully enumerated, recording the cubes each stage
/// removes. Throws BudgetExceeded when a stage exceeds the state budget.
void resolve_all_stages(PruningState& state);

Json checkpoint_json(const PruningState& state);
std::unique_ptr<PruningState> load_checkpoint(const Json& j);

Json tree_json(const TreeBuild& build);
/// index,stage,center,mass for the deepest layer.
std::string deepest_csv(const CantorTree& tree);

struct TreeFile {
    ConstructionParams params;
    bool complete = false;
    std::size_t built_layers = 0;
    std::vector<RationalVec> deepest;
};
TreeFile load_tree(const Json& j);

/// scale_num,scale_den_log,count with scale = scale_num / 2^scale_den_log.
std::string box_count_csv(const BoxCountSeries& s, unsigned lo);

enum class Status { Pass, Fail, Skip };
std::string status_name(Status s);

struct CheckResult {
    std::string name;
    Status status = Status::Skip;
    Json counts = Json::object();
    std::string detail;
};

struct ReportBundle {
    std::string command;
    Json config = Json::object();
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> artifacts;  // file, sha256

    bool ok() const;
    Json to_json() const;
    std::string to_text() const;
};

std::string sha256_hex(std::string_view bytes);
/// Two-space indent plus a trailing newline.
std::string dump(const Json& j);
Json parse_json(const std::string& text, const std::string& what);

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames, so readers never see a partial file.
void write_file(const std::string& path, const std::string& content);

}  // namespace badapprox::io
