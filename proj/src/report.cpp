#include "pigan/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pigan/attacks.hpp"
#include "pigan/text.hpp"

namespace pigan {

namespace {

std::string metric_cell(const MetricValue& m) {
  return m.value ? format_double(*m.value) : std::string();
}

// Minimal RFC-4180-style CSV row reader (quotes, doubled quotes, no
// embedded newlines outside quoted fields).
std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::string> records_header() {
  std::vector<std::string> h = {"model_name", "seed", "lambda", "n_subsets"};
  for (const auto& m : metric_names()) h.push_back(m);
  h.push_back("failure_reason");
  h.push_back("config");
  return h;
}

}  // namespace

void write_records_csv(std::ostream& os,
                       const std::vector<ExperimentRecord>& records) {
  const auto header = records_header();
  for (std::size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : records) {
    os << csv_escape(r.model_name) << ',' << r.seed << ','
       << format_double(r.lambda) << ',' << r.n_subsets;
    for (const auto& name : metric_names())
      os << ',' << metric_cell(*record_metric(r, name));
    os << ',' << csv_escape(r.failure_reason) << ','
       << csv_escape(r.config_json) << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("records csv: empty file");
  const auto header = parse_csv_row(line);
  if (header != records_header())
    throw std::runtime_error("records csv: unexpected header");

  std::vector<ExperimentRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = parse_csv_row(line);
    if (f.size() != header.size())
      throw std::runtime_error("records csv: wrong field count");
    ExperimentRecord r;
    r.model_name = f[0];
    r.seed = std::stoull(f[1]);
    r.lambda = std::stod(f[2]);
    r.n_subsets = std::stoull(f[3]);
    std::size_t at = 4;
    for (const auto& name : metric_names()) {
      MetricValue* m = record_metric(r, name);
      if (!f[at].empty()) m->value = std::stod(f[at]);
      ++at;
    }
    r.failure_reason = f[at++];
    r.config_json = f[at];
    records.push_back(std::move(r));
  }
  return records;
}

void write_records_json(std::ostream& os,
                        const std::vector<ExperimentRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["model_name"] = r.model_name;
    j["seed"] = r.seed;
    j["lambda"] = r.lambda;
    j["n_subsets"] = r.n_subsets;
    for (const auto& name : metric_names()) {
      const MetricValue* m = record_metric(r, name);
      j[name] = m->value ? nlohmann::json(*m->value) : nlohmann::json(nullptr);
      if (!m->value) j[name + "_reason"] = m->reason;
    }
    j["failure_reason"] = r.failure_reason;
    j["config"] = r.config_json.empty()
                      ? nlohmann::json(nullptr)
                      : nlohmann::json::parse(r.config_json);
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << '\n';
}

std::vector<ExperimentRecord> read_records_json(std::istream& is) {
  const nlohmann::json arr = nlohmann::json::parse(is);
  std::vector<ExperimentRecord> records;
  for (const auto& j : arr) {
    ExperimentRecord r;
    r.model_name = j.at("model_name");
    r.seed = j.at("seed");
    r.lambda = j.at("lambda");
    r.n_subsets = j.at("n_subsets");
    for (const auto& name : metric_names()) {
      MetricValue* m = record_metric(r, name);
      if (!j.at(name).is_null())
        m->value = j.at(name).get<double>();
      else if (j.contains(name + "_reason"))
        m->reason = j.at(name + "_reason");
    }
    r.failure_reason = j.at("failure_reason");
    if (!j.at("config").is_null()) r.config_json = j.at("config").dump();
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<AggregateCell> aggregate_records(
    const std::vector<ExperimentRecord>& records) {
  std::map<std::pair<double, std::size_t>, std::vector<const ExperimentRecord*>>
      cells;
  for (const auto& r : records)
    cells[{r.lambda, r.n_subsets}].push_back(&r);

  std::vector<AggregateCell> out;
  out.reserve(cells.size());
  for (const auto& [key, recs] : cells) {
    AggregateCell cell;
    cell.lambda = key.first;
    cell.n_subsets = key.second;
    cell.n_records = recs.size();
    cell.stats.resize(metric_names().size());
    for (std::size_t mi = 0; mi < metric_names().size(); ++mi) {
      std::vector<double> values;
      for (const ExperimentRecord* r : recs) {
        const MetricValue* m = record_metric(*r, metric_names()[mi]);
        if (m->value) values.push_back(*m->value);
      }
      auto& st = cell.stats[mi];
      st.count = values.size();
      if (!values.empty()) {
        double sum = 0.0;
        for (double v : values) sum += v;
        st.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
          double ss = 0.0;
          for (double v : values) ss += (v - st.mean) * (v - st.mean);
          st.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
      }
    }
    out.push_back(std::move(cell));
  }
  return out;
}

void write_aggregates_csv(std::ostream& os,
                          const std::vector<AggregateCell>& cells) {
  os << "lambda,n_subsets,n_records";
  for (const auto& m : metric_names()) os << ',' << m << "_mean," << m << "_std";
  os << '\n';
  for (const auto& c : cells) {
    os << format_double(c.lambda) << ',' << c.n_subsets << ',' << c.n_records;
    for (const auto& st : c.stats) {
      os << ',';
      if (st.count > 0) os << format_double(st.mean);
      os << ',';
      if (st.count > 1) os << format_double(st.stddev);
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG helpers
// ---------------------------------------------------------------------------

namespace {

struct PlotPoint {
  double lambda;
  std::size_t n_subsets;
  double x, x_std, y, y_std;
};

std::string svg_scatter(const std::vector<PlotPoint>& pts,
                        const std::string& x_label, const std::string& y_label) {
  const double width = 640, height = 480, margin = 60;
  double xmin = pts.front().x, xmax = pts.front().x;
  double ymin = pts.front().y, ymax = pts.front().y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto sx = [&](double v) {
    return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto sy = [&](double v) {
    return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
     << width - margin << "' y2='" << height - margin
     << "' stroke='black'/>\n";
  os << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
     << "' y2='" << height - margin << "' stroke='black'/>\n";
  os << "<text x='" << width / 2 << "' y='" << height - 15
     << "' text-anchor='middle' font-size='14'>" << x_label << "</text>\n";
  os << "<text x='18' y='" << height / 2
     << "' text-anchor='middle' font-size='14' transform='rotate(-90 18 "
     << height / 2 << ")'>" << y_label << "</text>\n";

  // polyline through the points in stored order
  os << "<polyline fill='none' stroke='#4477aa' stroke-width='1.5' points='";
  for (const auto& p : pts) os << sx(p.x) << ',' << sy(p.y) << ' ';
  os << "'/>\n";
  for (const auto& p : pts) {
    os << "<circle cx='" << sx(p.x) << "' cy='" << sy(p.y)
       << "' r='4' fill='#4477aa'/>\n";
    os << "<text x='" << sx(p.x) + 6 << "' y='" << sy(p.y) - 6
       << "' font-size='11'>lambda=" << format_double(p.lambda)
       << ", N=" << p.n_subsets << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

void emit_tradeoff_plot(const std::vector<ExperimentRecord>& records,
                        const std::string& x_metric, const std::string& y_metric,
                        const std::string& path_base) {
  auto metric_index = [](const std::string& name) {
    const auto& names = metric_names();
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    std::string msg = "unknown metric '" + name + "'; valid metrics:";
    for (const auto& n : names) msg += " " + n;
    throw std::invalid_argument(msg);
  };
  const std::size_t xi = metric_index(x_metric);
  const std::size_t yi = metric_index(y_metric);

  const auto cells = aggregate_records(records);
  std::vector<PlotPoint> pts;
  for (const auto& c : cells) {
    if (c.stats[xi].count == 0 || c.stats[yi].count == 0) continue;
    pts.push_back(PlotPoint{c.lambda, c.n_subsets, c.stats[xi].mean,
                            c.stats[xi].stddev, c.stats[yi].mean,
                            c.stats[yi].stddev});
  }
  if (pts.size() < 2)
    throw std::invalid_argument(
        "emit_tradeoff_plot: need at least 2 aggregated points, got " +
        std::to_string(pts.size()));
  std::sort(pts.begin(), pts.end(), [](const PlotPoint& a, const PlotPoint& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.n_subsets < b.n_subsets;
  });

  std::ofstream csv(path_base + ".csv");
  if (!csv) throw std::runtime_error("emit_tradeoff_plot: cannot write csv");
  csv << "lambda,n_subsets," << x_metric << "_mean," << x_metric << "_std,"
      << y_metric << "_mean," << y_metric << "_std\n";
  for (const auto& p : pts) {
    csv << format_double(p.lambda) << ',' << p.n_subsets << ','
        << format_double(p.x) << ',' << format_double(p.x_std) << ','
        << format_double(p.y) << ',' << format_double(p.y_std) << '\n';
  }

  std::ofstream svg(path_base + ".svg");
  if (!svg) throw std::runtime_error("emit_tradeoff_plot: cannot write svg");
  svg << svg_scatter(pts, x_metric, y_metric);
}

void emit_score_histogram(const Discriminator& d, const Dataset& train,
                          const Dataset& holdout, std::size_t n_codes,
                          std::size_t n_bins, const std::string& path_base) {
  if (train.empty() || holdout.empty())
    throw std::invalid_argument("emit_score_histogram: empty dataset");
  if (n_bins == 0)
    throw std::invalid_argument("emit_score_histogram: n_bins == 0");

  const bool conditional = d.config().n_labels > 0;
  auto histogram = [&](const Dataset& set) {
    std::vector<std::size_t> h(n_bins, 0);
    for (const auto& s : set) {
      const double v = wb_score(d, s.x, conditional ? s.label : -1, n_codes);
      std::size_t bin = static_cast<std::size_t>(v * static_cast<double>(n_bins));
      if (bin >= n_bins) bin = n_bins - 1;
      ++h[bin];
    }
    return h;
  };
  const auto ht = histogram(train);
  const auto hh = histogram(holdout);

  std::ofstream csv(path_base + ".csv");
  if (!csv) throw std::runtime_error("emit_score_histogram: cannot write csv");
  csv << "bin_lo,bin_hi,train_count,holdout_count\n";
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double lo = static_cast<double>(i) / static_cast<double>(n_bins);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n_bins);
    csv << format_double(lo) << ',' << format_double(hi) << ',' << ht[i] << ','
        << hh[i] << '\n';
  }

  // Normalized overlay so both sets are visible regardless of size.
  const double width = 640, height = 480, margin = 60;
  double peak = 0.0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    peak = std::max(peak, static_cast<double>(ht[i]) / train.size());
    peak = std::max(peak, static_cast<double>(hh[i]) / holdout.size());
  }
  if (peak == 0.0) peak = 1.0;

  std::ofstream svg(path_base + ".svg");
  if (!svg) throw std::runtime_error("emit_score_histogram: cannot write svg");
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  const double bw = (width - 2 * margin) / static_cast<double>(n_bins);
  auto bar = [&](std::size_t i, double frac, const char* color, double shift) {
    const double h = frac / peak * (height - 2 * margin);
    svg << "<rect x='" << margin + bw * static_cast<double>(i) + shift
        << "' y='" << height - margin - h << "' width='" << bw * 0.45
        << "' height='" << h << "' fill='" << color << "' fill-opacity='0.7'/>\n";
  };
  for (std::size_t i = 0; i < n_bins; ++i) {
    bar(i, static_cast<double>(ht[i]) / train.size(), "#4477aa", 0.0);
    bar(i, static_cast<double>(hh[i]) / holdout.size(), "#ee6677", bw * 0.5);
  }
  svg << "<text x='" << margin << "' y='" << margin - 20
      << "' font-size='13' fill='#4477aa'>train</text>\n";
  svg << "<text x='" << margin + 60 << "' y='" << margin - 20
      << "' font-size='13' fill='#ee6677'>holdout</text>\n";
  svg << "<text x='" << width / 2 << "' y='" << height - 15
      << "' text-anchor='middle' font-size='14'>max-over-code discriminator "
         "score</text>\n";
  svg << "</svg>\n";
}

}  // namespace pigan
