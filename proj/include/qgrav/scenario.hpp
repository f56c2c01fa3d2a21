#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgrav/loops.hpp"
#include "qgrav/params.hpp"

namespace qgrav::scenario {

struct OutputSpec {
    std::string format = "csv";  // csv | json
    std::string path = ".";
};

struct DesignRequest {
    int loops = 1;
    int m_targets = 1;
    int n_starts = 64;
};

struct ScenarioConfig {
    int version = 1;
    Deformation model = Deformation::gamma;
    std::string loop_name = "square";
    std::optional<loops::LoopSpec> inline_loop;
    ExperimentParams params;
    std::vector<std::string> analyses;
    OutputSpec output;
    unsigned seed = 12345;
    std::vector<double> r_grid;
    DesignRequest design;
    int bch_order = 6;
    int k_order = 2;
    int threads = 1;

    static ScenarioConfig from_json(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);
};

// Executes the configured analyses, writing one artifact per analysis.
// Returns the list of files written. Throws config_error for configuration
// problems; other exceptions indicate analysis failures.
std::vector<std::string> run(const ScenarioConfig& config);

// Golden table reproductions, returned as CSV text.
std::string table_csv(int which, int threads = 1);

// Squeezing sweep as CSV (r, variance, log10 N_r).
std::string sweep_csv(Deformation model, const std::string& loop_name,
                      const ExperimentParams& params, const std::vector<double>& r_grid);

// Desk-scale oracle comparison as CSV.
std::string oracle_check_csv(unsigned seed, int n_loops, int threads = 1);

// Atomic file write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qgrav::scenario

namespace qgrav::scenario::detail {

// One desk-scale comparison between the matrix oracle and the symbolic
// pipeline; used by the oracle-check analysis and the acceptance suite.
struct OracleComparison {
    loops::LoopSpec loop;
    Deformation model = Deformation::none;
    double strength = 0;
    double lambda0 = 0, k = 0, N_p = 0, nbar = 0;
    double oracle_phase = 0, exact_phase = 0, saddle_ph = 0;
    double exact_diff = 0, saddle_diff = 0;
    double exact_tol = 0, saddle_tol = 0;
    bool pass = false;
};

std::vector<OracleComparison> oracle_comparison(unsigned seed, int n_loops, int threads = 1);

}  // namespace qgrav::scenario::detail
