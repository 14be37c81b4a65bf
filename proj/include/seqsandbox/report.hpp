#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seqsandbox/harness.hpp"

namespace seqsandbox {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
  std::size_t n = 0;
};

MeanSd mean_sd(const std::vector<double>& values);
// "0.5" for one value, "0.5 ± 0.1" otherwise.
std::string format_mean_sd(const MeanSd& m);

// Short identifiers used as report keys.
std::string explorer_key(const RunLog& log);
std::string model_key(const RunLog& log);

// Logs sharing a landscape.
struct LandscapeGroup {
  std::string landscape;
  std::vector<const RunLog*> logs;
};

std::vector<LandscapeGroup> group_by_landscape(const std::vector<RunLog>& logs);

// landscape,explorer,model,round,mean,sd,n
void write_cummax_csv(std::ostream& out, const std::vector<LandscapeGroup>& groups);
// Rows landscape x y_tau x model, one column per explorer, mean ± sd of the
// final optima-found count. Empty cells where a log has no optima data.
void write_optima_table(std::ostream& out, const std::vector<LandscapeGroup>& groups);
// Mean cummax trajectories of each explorer/model pair in one group.
void write_cummax_svg(std::ostream& out, const LandscapeGroup& group);

}  // namespace seqsandbox
