#pragma once

// Result persistence and figure emission. Every plot gets a deterministic
// CSV twin so downstream checks never parse images; the SVG files are
// convenience renderings of the same points.

#include <iosfwd>
#include <string>
#include <vector>

#include "pigan/experiment.hpp"

namespace pigan {

// records.csv schema (fixed): model_name, seed, lambda, n_subsets, the
// metric columns in metric_names() order, failure_reason, config.
// Null metrics serialize as empty cells.
void write_records_csv(std::ostream& os,
                       const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);

void write_records_json(std::ostream& os,
                        const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_json(std::istream& is);

// Per-(lambda, n_subsets) mean and n-1 std of each metric over seeds.
struct AggregateCell {
  double lambda = 0.0;
  std::size_t n_subsets = 2;
  std::size_t n_records = 0;
  // parallel to metric_names(); count = values that were non-null
  struct Stat {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // 0 when count < 2
  };
  std::vector<Stat> stats;
};

std::vector<AggregateCell> aggregate_records(
    const std::vector<ExperimentRecord>& records);
void write_aggregates_csv(std::ostream& os,
                          const std::vector<AggregateCell>& cells);

// Writes <path_base>.csv (mandatory, bit-stable) and <path_base>.svg with
// one aggregated point per (lambda, n_subsets), sorted by lambda then N.
// Throws on unknown metric names (listing the valid ones) and on fewer
// than two aggregated points.
void emit_tradeoff_plot(const std::vector<ExperimentRecord>& records,
                        const std::string& x_metric,
                        const std::string& y_metric,
                        const std::string& path_base);

// Overlaid histograms of max-over-code discriminator scores on train vs
// holdout. Writes <path_base>.csv (bin_lo, bin_hi, train_count,
// holdout_count) and <path_base>.svg.
void emit_score_histogram(const Discriminator& d, const Dataset& train,
                          const Dataset& holdout, std::size_t n_codes,
                          std::size_t n_bins, const std::string& path_base);

}  // namespace pigan
