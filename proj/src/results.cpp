#include "sattrack/results.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "numfmt.hpp"
#include "sattrack/errors.hpp"

namespace sattrack {

using detail::format_double;

void write_results_header(std::ostream& os) { os << kResultsHeader << '\n'; }

void write_result_row(std::ostream& os, const FrameResult& r) {
  os << r.frame << ',' << format_double(r.out_box.cx) << ',' << format_double(r.out_box.cy) << ','
     << format_double(r.out_box.w) << ',' << format_double(r.out_box.h) << ',' << phase_name(r.phase) << ','
     << format_double(r.s_sam) << ',' << format_double(r.s_kf) << ',' << (r.mem_admit ? 1 : 0) << ',' << r.selected
     << '\n';
}

void write_truncation_marker(std::ostream& os, std::int64_t frame, const std::string& reason) {
  std::string flat = reason;
  for (char& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  os << "# truncated at frame " << frame << ": " << flat << '\n';
}

ResultsFile read_results(std::istream& is) {
  ResultsFile out;
  std::string line;
  if (!std::getline(is, line) || (line != kResultsHeader && line != std::string(kResultsHeader) + "\r")) {
    throw ConfigError("results file must start with '" + std::string(kResultsHeader) + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.truncation = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    const auto bad = [&] { return ConfigError("results line " + std::to_string(lineno) + " is malformed"); };
    if (f.size() != 10) throw bad();
    const auto num = [&](const std::string& s) {
      const auto v = detail::parse_double(s);
      if (!v) throw bad();
      return *v;
    };
    const auto integer = [&](const std::string& s) -> std::int64_t {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(s, &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != s.size()) throw bad();
      return v;
    };
    FrameResult r;
    r.frame = integer(f[0]);
    r.out_box = {num(f[1]), num(f[2]), num(f[3]), num(f[4])};
    try {
      r.phase = parse_phase(f[5]);
    } catch (const Error&) {
      throw bad();
    }
    r.s_sam = num(f[6]);
    r.s_kf = num(f[7]);
    const auto admit = integer(f[8]);
    if (admit != 0 && admit != 1) throw bad();
    r.mem_admit = admit == 1;
    r.selected = static_cast<int>(integer(f[9]));
    out.rows.push_back(r);
  }
  return out;
}

}  // namespace sattrack
