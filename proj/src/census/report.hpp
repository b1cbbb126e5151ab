#pragma once

#include "census/census.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace cuspzero::census {

// Extra rows appended after the zeros of a per-form CSV (sign witnesses and the like).
struct WitnessRow {
  std::string kind;
  std::string a, b, c, d, note;
};

std::string census_file_name(int k, int idx);

void write_zero_csv(std::ostream& out, const CensusReport& rep, const std::vector<WitnessRow>& witnesses = {});
void write_summary_header(std::ostream& out);
// One line per Y in rep.siegel (or one line with empty Siegel fields when there is none).
void write_summary_rows(std::ostream& out, const CensusReport& rep);

}  // namespace cuspzero::census
