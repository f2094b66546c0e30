#pragma once

#include <vector>

#include "fpld/config.hpp"
#include "fpld/report.hpp"

namespace fpld::cli {

/// a_k = k and a_k = k^2 with N = 1000 and N = 100, in that order.
std::vector<PopulationSpec> default_table_populations();

Report cmd_moments(const ExperimentConfig& cfg);
/// Tail rows for cfg.statistic over cfg.x_grid, one row per (method, x).
Report cmd_tail(const ExperimentConfig& cfg);
/// P(t_n >= x) / (1 - Phi(x)) on each table population (or cfg.population if set).
Report cmd_table1(const ExperimentConfig& cfg);
/// Monte Carlo P(t_n >= x) against the Student saddlepoint approximation.
Report cmd_table2(const ExperimentConfig& cfg);
/// Envelope and band values over the x grid; requires cfg.A.
Report cmd_envelope(const ExperimentConfig& cfg);

}  // namespace fpld::cli
