#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "metabbo/error.hpp"
#include "metabbo/harness.hpp"

namespace metabbo::harness {

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string optional_cell(const std::optional<double>& v) { return v ? g17(*v) : std::string("NA"); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::io, "write failed for " + path.string());
}

const char* membership_name(metrics::Membership m) { return m == metrics::Membership::seen ? "seen" : "unseen"; }

}  // namespace

ReportFormat parse_report_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "latex") return ReportFormat::latex;
  if (text == "traces") return ReportFormat::traces;
  throw Error(Errc::configuration, "unknown report format '" + text + "' (csv, latex, traces)");
}

std::string format_sci(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", decimals, value);
  std::string s(buf);
  const auto e = s.find('e');
  const std::string mantissa = s.substr(0, e);
  const int exponent = std::atoi(s.c_str() + e + 1);
  return mantissa + (exponent < 0 ? "e-" : "e+") + std::to_string(std::abs(exponent));
}

std::string format_cell(double v_avg, double v_std) {
  return format_sci(v_avg, 4) + " (" + format_sci(v_std, 2) + ")";
}

std::string report_csv(const TestReport& report) {
  std::ostringstream out;
  out << "components,baseline,function_id,dim,membership,v_avg,v_std,baseline_v_avg,baseline_v_std,mark,p_value\n";
  const auto& rows = report.algorithm.rows();
  const auto& base = report.baseline_table.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& c = report.comparisons.at(i);
    out << report.components << ',' << report.baseline << ',' << rows[i].function_id << ',' << rows[i].dim << ','
        << membership_name(rows[i].membership) << ',' << g17(rows[i].v_avg) << ',' << g17(rows[i].v_std) << ','
        << g17(base.at(i).v_avg) << ',' << g17(base.at(i).v_std) << ',' << c.mark.symbol() << ','
        << g17(c.mark.p_value) << '\n';
  }
  return out.str();
}

std::string report_summary_csv(const TestReport& report) {
  std::ostringstream out;
  out << "components,baseline,dim,better,worse,equal,transferability,generalization,train_dim\n";
  for (int dim : report.dims) {
    const MarkCounts c = report.counts(dim);
    const auto ti = report.transferability.find(dim);
    out << report.components << ',' << report.baseline << ',' << dim << ',' << c.better << ',' << c.worse << ','
        << c.equal << ',' << (ti == report.transferability.end() ? std::string("NA") : optional_cell(ti->second))
        << ',' << optional_cell(report.generalization) << ','
        << (report.train_dim ? std::to_string(*report.train_dim) : std::string("NA")) << '\n';
  }
  return out.str();
}

std::string report_latex(const TestReport& report, int dim) {
  std::ostringstream out;
  out << "\\begin{tabular}{lcc}\n\\hline\n";
  out << "Problem (D=" << dim << ") & " << report.components << " & " << report.baseline << " \\\\\n\\hline\n";
  MarkCounts counts;
  const auto& rows = report.algorithm.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dim != dim) continue;
    const auto& b = report.baseline_table.rows().at(i);
    const metrics::Mark m = report.comparisons.at(i).mark.mark;
    if (m == metrics::Mark::better) ++counts.better;
    else if (m == metrics::Mark::worse) ++counts.worse;
    else ++counts.equal;
    out << "BBOB\\_F" << rows[i].function_id << " & " << format_cell(rows[i].v_avg, rows[i].v_std) << ' '
        << metrics::to_symbol(m) << " & " << format_cell(b.v_avg, b.v_std) << " \\\\\n";
  }
  out << "\\hline\n+/-/= & " << counts.better << '/' << counts.worse << '/' << counts.equal << " &  \\\\\n";
  out << "\\hline\n\\end{tabular}\n";
  return out.str();
}

std::string trace_csv(const std::vector<RunRecord>& runs, int function_id, int dim) {
  std::ostringstream out;
  out << "replication,generation,best_error\n";
  for (const auto& run : runs) {
    if (run.function_id != function_id || run.dim != dim) continue;
    for (std::size_t g = 1; g < run.trace.size(); ++g) {
      out << run.replication << ',' << g << ',' << g17(run.trace[g]) << '\n';
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_report(const TestReport& report, ReportFormat format,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& p, const std::string& text) {
    write_file(p, text);
    written.push_back(p);
  };
  switch (format) {
    case ReportFormat::csv:
      emit(dir / "report.csv", report_csv(report));
      emit(dir / "summary.csv", report_summary_csv(report));
      break;
    case ReportFormat::latex:
      for (int dim : report.dims) emit(dir / ("report_D" + std::to_string(dim) + ".tex"), report_latex(report, dim));
      break;
    case ReportFormat::traces: {
      const auto tdir = dir / "traces";
      std::filesystem::create_directories(tdir, ec);
      if (ec) throw Error(Errc::io, "cannot create " + tdir.string() + ": " + ec.message());
      for (const auto& row : report.algorithm.rows()) {
        const std::string suffix = "_F" + std::to_string(row.function_id) + "_D" + std::to_string(row.dim) + ".csv";
        emit(tdir / (report.components + suffix), trace_csv(report.algorithm_runs, row.function_id, row.dim));
        emit(tdir / (report.baseline + suffix), trace_csv(report.baseline_runs, row.function_id, row.dim));
      }
      break;
    }
  }
  return written;
}

}  // namespace metabbo::harness
