#include "census/report.hpp"

#include <cstdio>

namespace cuspzero::census {

namespace {

std::string num(double x, int digits = 15) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

}  // namespace

std::string census_file_name(int k, int idx) {
  return "census_k" + std::to_string(k) + "_i" + std::to_string(idx) + ".csv";
}

void write_zero_csv(std::ostream& out, const CensusReport& rep, const std::vector<WitnessRow>& witnesses) {
  out << "segment,param_lo,param_hi,location,width,flags\n";
  for (const auto& z : rep.zeros)
    out << segment_name(z.segment) << ',' << num(z.param_lo, 17) << ',' << num(z.param_hi, 17) << ','
        << num(z.location, 17) << ',' << num(z.width, 3) << ',' << z.flags() << '\n';
  for (const auto& w : witnesses)
    out << w.kind << ',' << w.a << ',' << w.b << ',' << w.c << ',' << w.d << ',' << w.note << '\n';
}

void write_summary_header(std::ostream& out) {
  out << "k,idx,n_delta1,n_delta2,n_delta3,n_total_FY,Y,ratio_real,pred_delta1,pred_delta2,pred_delta3,status\n";
}

void write_summary_rows(std::ostream& out, const CensusReport& rep) {
  std::string pred = ",,";
  if (rep.predictions)
    pred = num(rep.predictions->delta1, 8) + ',' + num(rep.predictions->delta2, 8) + ',' +
           num(rep.predictions->delta3, 8);
  const std::string head = std::to_string(rep.weight) + ',' + std::to_string(rep.dim_index) + ',' +
                           std::to_string(rep.n_delta1) + ',' + std::to_string(rep.n_delta2) + ',' +
                           std::to_string(rep.n_delta3) + ',';
  std::string base_status = rep.errors.empty() ? "ok" : "error";
  if (rep.siegel.empty()) {
    out << head << ",,," << pred << ',' << base_status << '\n';
    return;
  }
  for (const auto& s : rep.siegel) {
    out << head << (s.status == "ok" ? std::to_string(s.total) : "") << ',' << num(s.Y_used) << ','
        << (s.ratio ? num(*s.ratio, 8) : "n/a") << ',' << pred << ',' << (s.status == "ok" ? base_status : "error")
        << '\n';
  }
}

}  // namespace cuspzero::census
