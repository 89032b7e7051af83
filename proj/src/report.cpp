// Copyright 2026 The sfequiv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfe/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "sfe/csv.hpp"
#include "sfe/error.hpp"

namespace sfe {

namespace {

const std::vector<std::string> kScoreColumns = {
    "label",           "file",          "kind",
    "roc_univariate",  "roc_bivariate", "cio",
    "overall_utility", "raw_tcap",      "baseline",
    "marginal_tcap",   "matched_fraction", "no_match_pairs"};

double parse_double(const std::string& s, const std::string& what,
                    std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedNumeric,
                "scores line " + std::to_string(line) + ": bad " + what +
                    " '" + s + "'");
  }
  return v;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.000" || s == "-0.00") s.erase(0, 1);
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

ScoreRow score_row(const std::string& label, const std::string& file,
                   const Scores& s) {
  ScoreRow r;
  r.label = label;
  r.file = file;
  r.roc_univariate = s.utility.roc_univariate;
  r.roc_bivariate = s.utility.roc_bivariate;
  r.cio = s.utility.cio;
  r.overall_utility = s.utility.overall;
  r.raw_tcap = s.risk.raw_tcap;
  r.baseline = s.risk.baseline;
  r.marginal_tcap = s.risk.marginal;
  r.matched_fraction = s.risk.matched_fraction;
  r.no_match_pairs = static_cast<double>(s.risk.no_match_pairs);
  return r;
}

ScoreRow mean_row(const std::string& label, std::span<const ScoreRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyScores, "no rows to average");
  ScoreRow m;
  m.label = label;
  m.kind = "mean";
  for (const auto& r : rows) {
    m.roc_univariate += r.roc_univariate;
    m.roc_bivariate += r.roc_bivariate;
    m.cio += r.cio;
    m.overall_utility += r.overall_utility;
    m.raw_tcap += r.raw_tcap;
    m.baseline += r.baseline;
    m.marginal_tcap += r.marginal_tcap;
    m.matched_fraction += r.matched_fraction;
    m.no_match_pairs += r.no_match_pairs;
  }
  const double n = static_cast<double>(rows.size());
  for (double* f : {&m.roc_univariate, &m.roc_bivariate, &m.cio,
                    &m.overall_utility, &m.raw_tcap, &m.baseline,
                    &m.marginal_tcap, &m.matched_fraction, &m.no_match_pairs}) {
    *f /= n;
  }
  return m;
}

void write_scores_csv(std::span<const ScoreRow> rows, std::ostream& out) {
  write_csv_row(out, kScoreColumns);
  for (const auto& r : rows) {
    const std::string fields[] = {
        r.label,
        r.file,
        r.kind,
        format_number(r.roc_univariate),
        format_number(r.roc_bivariate),
        format_number(r.cio),
        format_number(r.overall_utility),
        format_number(r.raw_tcap),
        format_number(r.baseline),
        format_number(r.marginal_tcap),
        format_number(r.matched_fraction),
        format_number(r.no_match_pairs)};
    write_csv_row(out, fields);
  }
}

std::vector<ScoreRow> read_scores_csv(std::istream& in) {
  const auto rows = parse_csv(in);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "scores file is empty");
  const auto& header = rows[0];
  std::vector<std::size_t> col(kScoreColumns.size());
  for (std::size_t k = 0; k < kScoreColumns.size(); ++k) {
    auto it = std::find(header.begin(), header.end(), kScoreColumns[k]);
    if (it == header.end()) {
      throw Error(ErrorCode::MissingColumn,
                  "scores file has no column '" + kScoreColumns[k] + "'");
    }
    col[k] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<ScoreRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::MalformedInput,
                  "scores line " + std::to_string(i + 1) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    ScoreRow r;
    r.label = row[col[0]];
    r.file = row[col[1]];
    r.kind = row[col[2]];
    if (r.kind != "replicate" && r.kind != "mean") {
      throw Error(ErrorCode::MalformedInput,
                  "scores line " + std::to_string(i + 1) + ": kind '" +
                      r.kind + "'");
    }
    double* fields[] = {&r.roc_univariate, &r.roc_bivariate, &r.cio,
                        &r.overall_utility, &r.raw_tcap, &r.baseline,
                        &r.marginal_tcap, &r.matched_fraction,
                        &r.no_match_pairs};
    for (std::size_t k = 0; k < 9; ++k) {
      *fields[k] = parse_double(row[col[k + 3]], kScoreColumns[k + 3], i + 1);
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyScores, "scores file has no rows");
  return out;
}

std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return read_scores_csv(in);
  } catch (const Error& e) {
    throw e.annotated(path.string());
  }
}

std::vector<EquivalenceRow> equivalence_report(std::span<const ScoreRow> rows,
                                               const RUCurve& curve) {
  if (rows.empty()) throw Error(ErrorCode::EmptyScores, "no scores");
  std::vector<std::string> order;
  std::map<std::string, std::vector<ScoreRow>> replicates;
  std::map<std::string, ScoreRow> means;
  for (const auto& r : rows) {
    if (!replicates.count(r.label) && !means.count(r.label)) {
      order.push_back(r.label);
    }
    if (r.kind == "mean") {
      means[r.label] = r;
    } else {
      replicates[r.label].push_back(r);
    }
  }
  std::vector<EquivalenceRow> out;
  for (const auto& label : order) {
    auto it = replicates.find(label);
    const ScoreRow m = it != replicates.end() ? mean_row(label, it->second)
                                              : means.at(label);
    EquivalenceRow e;
    e.synthesizer = label;
    e.result = equivalence_of_means(m.overall_utility, m.marginal_tcap, curve);
    e.utility_text = format_interval(e.result.utility_interval, curve);
    e.risk_text = format_interval(e.result.risk_interval, curve);
    e.utility_interpolated = interpolate_fraction(
        e.result.utility, curve, CurveAxis::Utility, e.result.utility_interval);
    e.risk_interpolated = interpolate_fraction(
        e.result.risk, curve, CurveAxis::Risk, e.result.risk_interval);
    out.push_back(std::move(e));
  }
  return out;
}

void write_equivalence_csv(std::span<const EquivalenceRow> rows,
                           std::ostream& out) {
  const std::string header[] = {"synthesizer", "overall_utility",
                                "risk_marginal_tcap", "sample_equiv_utility",
                                "sample_equiv_risk"};
  write_csv_row(out, header);
  for (const auto& r : rows) {
    const std::string fields[] = {r.synthesizer, fixed(r.result.utility, 3),
                                  fixed(r.result.risk, 3), r.utility_text,
                                  r.risk_text};
    write_csv_row(out, fields);
  }
}

void write_equivalence_diagnostics(std::span<const EquivalenceRow> rows,
                                   std::ostream& out) {
  const std::string header[] = {"synthesizer", "axis", "value", "interval",
                                "interpolated_fraction"};
  write_csv_row(out, header);
  for (const auto& r : rows) {
    const std::string u[] = {r.synthesizer, "utility",
                             format_number(r.result.utility), r.utility_text,
                             optional_number(r.utility_interpolated)};
    write_csv_row(out, u);
    const std::string k[] = {r.synthesizer, "risk",
                             format_number(r.result.risk), r.risk_text,
                             optional_number(r.risk_interpolated)};
    write_csv_row(out, k);
  }
}

void write_cio_header(std::ostream& out) {
  const std::string header[] = {"label",      "file",        "model",
                                "term",       "orig_lower",  "orig_upper",
                                "synth_lower", "synth_upper", "overlap",
                                "clamped"};
  write_csv_row(out, header);
}

void write_cio_rows(const std::string& label, const std::string& file,
                    const CioResult& cio, std::ostream& out) {
  for (const auto& t : cio.terms) {
    const std::string fields[] = {label,
                                  file,
                                  t.model,
                                  t.term,
                                  format_number(t.original.lower),
                                  format_number(t.original.upper),
                                  format_number(t.synthetic.lower),
                                  format_number(t.synthetic.upper),
                                  format_number(t.overlap),
                                  format_number(std::max(0.0, t.overlap))};
    write_csv_row(out, fields);
  }
}

std::vector<RuMapPoint> synthetic_points(std::span<const ScoreRow> rows) {
  std::vector<RuMapPoint> out;
  if (rows.empty()) return out;
  for (const auto& r : equivalence_report(rows, RUCurve{{terminal_point()}, {}})) {
    out.push_back({r.synthesizer, r.result.utility, r.result.risk});
  }
  return out;
}

std::string render_rumap_svg(const RUCurve& curve,
                             std::span<const RuMapPoint> synthetic) {
  const RUCurve c = curve.normalized();
  constexpr double kWidth = 640, kHeight = 480;
  constexpr double kLeft = 70, kRight = 190, kTop = 30, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double y_min = 0.0;
  for (const auto& p : c.points) y_min = std::min(y_min, p.mean_risk);
  for (const auto& p : synthetic) y_min = std::min(y_min, p.risk);
  if (y_min < 0) y_min = std::floor(y_min * 10.0 - 1e-9) / 10.0;
  const double y_max = 1.0;

  auto sx = [&](double u) { return kLeft + std::clamp(u, 0.0, 1.0) * plot_w; };
  auto sy = [&](double r) {
    return kTop + (y_max - r) / (y_max - y_min) * plot_h;
  };
  auto n2 = [](double v) { return fixed(v, 2); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
    << kWidth << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth
    << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" fill=\"white\"/>\n";

  // Axes, ticks and grid.
  o << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << n2(kLeft) << "\" y1=\"" << n2(kTop + plot_h)
    << "\" x2=\"" << n2(kLeft + plot_w) << "\" y2=\"" << n2(kTop + plot_h)
    << "\"/>\n";
  o << "<line x1=\"" << n2(kLeft) << "\" y1=\"" << n2(kTop) << "\" x2=\""
    << n2(kLeft) << "\" y2=\"" << n2(kTop + plot_h) << "\"/>\n";
  o << "</g>\n<g id=\"ticks\" fill=\"black\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double u = i / 5.0;
    o << "<line x1=\"" << n2(sx(u)) << "\" y1=\"" << n2(kTop + plot_h)
      << "\" x2=\"" << n2(sx(u)) << "\" y2=\"" << n2(kTop + plot_h + 5)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << n2(sx(u)) << "\" y=\"" << n2(kTop + plot_h + 18)
      << "\" text-anchor=\"middle\">" << fixed(u, 1) << "</text>\n";
  }
  const int y_steps = static_cast<int>(std::lround((y_max - y_min) / 0.2));
  for (int i = 0; i <= y_steps; ++i) {
    const double r = y_max - i * (y_max - y_min) / y_steps;
    o << "<line x1=\"" << n2(kLeft - 5) << "\" y1=\"" << n2(sy(r))
      << "\" x2=\"" << n2(kLeft) << "\" y2=\"" << n2(sy(r))
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << n2(kLeft - 8) << "\" y=\"" << n2(sy(r) + 4)
      << "\" text-anchor=\"end\">" << fixed(r, 1) << "</text>\n";
  }
  if (y_min < 0) {
    o << "<line x1=\"" << n2(kLeft) << "\" y1=\"" << n2(sy(0)) << "\" x2=\""
      << n2(kLeft + plot_w) << "\" y2=\"" << n2(sy(0))
      << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  }
  o << "<text x=\"" << n2(kLeft + plot_w / 2) << "\" y=\""
    << n2(kHeight - 15) << "\" text-anchor=\"middle\">Utility</text>\n";
  o << "<text x=\"18\" y=\"" << n2(kTop + plot_h / 2)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << n2(kTop + plot_h / 2) << ")\">Risk (marginal TCAP)</text>\n";
  o << "</g>\n";

  // Sample curve.
  o << "<g id=\"sample-curve\">\n<polyline fill=\"none\" stroke=\"#1f77b4\" "
       "stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    if (i) o << ' ';
    o << n2(sx(c.points[i].mean_utility)) << ','
      << n2(sy(c.points[i].mean_risk));
  }
  o << "\"/>\n";
  for (const auto& p : c.points) {
    const double x = sx(p.mean_utility), y = sy(p.mean_risk);
    o << "<circle cx=\"" << n2(x) << "\" cy=\"" << n2(y)
      << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    o << "<text x=\"" << n2(x + 4) << "\" y=\"" << n2(y - 4)
      << "\" font-size=\"8\" fill=\"#1f77b4\">"
      << xml_escape(format_percent(p.fraction)) << "</text>\n";
  }
  o << "</g>\n";

  // Synthetic points: one marker shape and colour per label.
  static const char* kColours[] = {"#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2"};
  auto marker = [&](std::size_t i, double x, double y) {
    const char* col = kColours[i % 6];
    std::ostringstream m;
    switch (i % 4) {
      case 0:
        m << "<rect class=\"marker\" x=\"" << n2(x - 4) << "\" y=\""
          << n2(y - 4) << "\" width=\"8\" height=\"8\" fill=\"" << col
          << "\"/>";
        break;
      case 1:
        m << "<polygon class=\"marker\" points=\"" << n2(x) << ','
          << n2(y - 5) << ' ' << n2(x + 5) << ',' << n2(y + 4) << ' '
          << n2(x - 5) << ',' << n2(y + 4) << "\" fill=\"" << col << "\"/>";
        break;
      case 2:
        m << "<polygon class=\"marker\" points=\"" << n2(x) << ','
          << n2(y - 5) << ' ' << n2(x + 5) << ',' << n2(y) << ' ' << n2(x)
          << ',' << n2(y + 5) << ' ' << n2(x - 5) << ',' << n2(y)
          << "\" fill=\"" << col << "\"/>";
        break;
      default:
        m << "<path class=\"marker\" d=\"M" << n2(x - 4) << ' ' << n2(y - 4)
          << " L" << n2(x + 4) << ' ' << n2(y + 4) << " M" << n2(x - 4)
          << ' ' << n2(y + 4) << " L" << n2(x + 4) << ' ' << n2(y - 4)
          << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>";
    }
    return m.str();
  };
  if (!synthetic.empty()) {
    o << "<g id=\"synthetic\">\n";
    for (std::size_t i = 0; i < synthetic.size(); ++i) {
      const double x = sx(synthetic[i].utility), y = sy(synthetic[i].risk);
      o << marker(i, x, y) << '\n';
      o << "<text x=\"" << n2(x + 7) << "\" y=\"" << n2(y + 4) << "\">"
        << xml_escape(synthetic[i].label) << "</text>\n";
    }
    o << "</g>\n";
  }

  // Legend.
  const double lx = kLeft + plot_w + 20;
  o << "<g id=\"legend\">\n";
  o << "<line x1=\"" << n2(lx) << "\" y1=\"" << n2(kTop + 10) << "\" x2=\""
    << n2(lx + 20) << "\" y2=\"" << n2(kTop + 10)
    << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
  o << "<text x=\"" << n2(lx + 26) << "\" y=\"" << n2(kTop + 14)
    << "\">Sample fractions</text>\n";
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    const double y = kTop + 30 + 18.0 * static_cast<double>(i);
    o << marker(i, lx + 10, y) << '\n';
    o << "<text x=\"" << n2(lx + 26) << "\" y=\"" << n2(y + 4) << "\">"
      << xml_escape(synthetic[i].label) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char h[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

}  // namespace sfe
