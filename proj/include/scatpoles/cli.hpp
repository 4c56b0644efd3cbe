#pragma once

// Front end: JSON run configuration, flag/environment overrides, and the
// scan | poles | convergence | disk-oracle commands.

#include "scatpoles/diskoracle.hpp"
#include "scatpoles/geometry.hpp"
#include "scatpoles/nepsolve.hpp"

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatpoles::cli {

using cplx = std::complex<double>;
using galerkin::OperatorFlavor;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kThreadsEnv = "SCATPOLES_THREADS";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CurveSpec {
    geometry::CurveKind kind = geometry::CurveKind::disk;
    double radius = 1.0;
    std::vector<double> cosine{1.0};
    std::vector<double> sine;

    geometry::Curve build() const;
};

struct RunConfig {
    CurveSpec curve;
    std::string flavor = "both";  ///< single | double | both
    int n = 32;
    std::vector<int> n_list;  ///< convergence runs
    int scan_n = 0;           ///< 0: min(n, 32)
    int reference_n = 0;      ///< 0: largest entry of n_list
    nepsolve::SearchRegion region;
    nepsolve::Contour indicator;
    double candidate_threshold = -12.0;
    nepsolve::RefineOptions refine;
    std::vector<cplx> candidates;  ///< skips the scan when non-empty
    std::vector<cplx> targets;     ///< convergence targets
    int nu_max = 10;
    int oracle_seeds = 24;
    std::uint64_t seed = nepsolve::kDefaultSeed;
    int threads = 1;
    std::string out_dir = ".";
    std::string prefix = "scatpoles";

    void validate() const;
    std::vector<OperatorFlavor> flavors() const;
    int effective_scan_n() const { return scan_n > 0 ? scan_n : std::min(n, 32); }
    nlohmann::ordered_json to_json() const;
};

/// Rejects unknown keys at every level; throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct Overrides {
    std::optional<int> n;
    std::optional<std::string> flavor;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> prefix;
    std::optional<int> nu_max;
};

/// config < environment (thread count) < flags.
void apply_overrides(RunConfig& config, const Overrides& flags, const char* env_threads);

/// Each command validates, computes, then writes its files and a manifest.
/// Returns the exit code; errors are reported on `log`.
int cmd_scan(const RunConfig& config, std::ostream& log);
int cmd_poles(const RunConfig& config, std::ostream& log);
int cmd_convergence(const RunConfig& config, std::ostream& log);
int cmd_disk_oracle(const RunConfig& config, std::ostream& log);

/// Text table of poles, one row per pole, columns per flavor, 15 decimals.
void write_pole_table(std::ostream& out, const std::vector<nepsolve::PoleEstimate>& poles);

int main(int argc, char** argv);

}  // namespace scatpoles::cli
