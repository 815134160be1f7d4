///////////////////////////////////////////////////////////////////////////////
// results.hpp: per-frame results CSV.
//
//   frame,cx,cy,w,h,phase,s_sam,s_kf,mem_admit,selected
//
// Numbers use the shortest representation that round-trips. A run that stops
// early ends with a "# truncated at frame N: <reason>" line.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sattrack/tracker.hpp"

namespace sattrack {

inline constexpr const char* kResultsHeader = "frame,cx,cy,w,h,phase,s_sam,s_kf,mem_admit,selected";

void write_results_header(std::ostream& os);
void write_result_row(std::ostream& os, const FrameResult& r);
void write_truncation_marker(std::ostream& os, std::int64_t frame, const std::string& reason);

struct ResultsFile {
  std::vector<FrameResult> rows;
  std::optional<std::string> truncation;  // marker text after "# "
};

// Throws ConfigError for a wrong header or a malformed row.
ResultsFile read_results(std::istream& is);

}  // namespace sattrack
