#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "lockbox/bench/experiment.hpp"

namespace lockbox::bench {

namespace {

const char* const kFeatureNames[5] = {"dx", "dy", "dz", "dk", "bias"};

// linear interpolation between order statistics
double quantile(const std::vector<int>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string num(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << v;
  return out.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::base: return "base";
    case Variant::attention: return "base+attention";
    case Variant::dqn: return "dqn";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "base") return Variant::base;
  if (name == "base+attention" || name == "attention") return Variant::attention;
  if (name == "dqn") return Variant::dqn;
  throw ConfigError("unknown variant '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::deps: return "deps";
    case ExperimentKind::demo: return "demo";
    case ExperimentKind::dqn: return "dqn";
  }
  return "?";
}

ExperimentKind kind_from_string(const std::string& name) {
  if (name == "sweep") return ExperimentKind::sweep;
  if (name == "deps") return ExperimentKind::deps;
  if (name == "demo") return ExperimentKind::demo;
  if (name == "dqn") return ExperimentKind::dqn;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::size_t, Variant>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> cells;
  for (const auto& r : rows) {
    Key key{r.config, r.scale, r.variant};
    auto& members = cells[key];
    if (members.empty()) order.push_back(key);
    members.push_back(&r);
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    const auto& members = cells[key];
    CellSummary s;
    std::tie(s.config, s.scale, s.variant) = key;
    s.trials = static_cast<int>(members.size());
    std::vector<int> steps;
    double total = 0.0;
    learning::FeatureVec weights = learning::FeatureVec::Zero();
    int weighted = 0;
    for (const auto* r : members) {
      s.solved += r->solved ? 1 : 0;
      steps.push_back(r->steps);
      total += r->steps;
      if (r->weights) {
        weights += *r->weights;
        ++weighted;
      }
    }
    std::sort(steps.begin(), steps.end());
    s.success_rate = static_cast<double>(s.solved) / s.trials;
    s.mean_steps = total / s.trials;
    s.min = steps.front();
    s.q25 = quantile(steps, 0.25);
    s.median = quantile(steps, 0.5);
    s.q75 = quantile(steps, 0.75);
    s.max = steps.back();
    if (weighted > 0) s.mean_weights = weights / weighted;
    out.push_back(std::move(s));
  }
  return out;
}

std::optional<learning::FeatureVec> mean_weights(const std::vector<ResultRow>& rows,
                                                 const std::string& config, Variant variant) {
  learning::FeatureVec sum = learning::FeatureVec::Zero();
  int count = 0;
  for (const auto& r : rows) {
    if (r.config != config || r.variant != variant || !r.weights) continue;
    sum += *r.weights;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

void write_trials_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "experiment,config,scale,variant,trial,seed,solved,steps,min_steps";
  for (const char* f : kFeatureNames) out << ",w_" << f;
  out << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.config << ',' << r.scale << ',' << to_string(r.variant) << ','
        << r.trial << ',' << r.seed << ',' << (r.solved ? 1 : 0) << ',' << r.steps << ','
        << r.min_steps;
    for (int i = 0; i < 5; ++i) out << ',' << (r.weights ? num((*r.weights)[i]) : "");
    out << '\n';
  }
}

std::vector<ResultRow> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trials CSV");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 14) throw std::runtime_error("malformed trials CSV row: " + line);
    ResultRow r;
    r.experiment = f[0];
    r.config = f[1];
    r.scale = std::stoul(f[2]);
    r.variant = variant_from_string(f[3]);
    r.trial = std::stoi(f[4]);
    r.seed = std::stoull(f[5]);
    r.solved = f[6] == "1";
    r.steps = std::stoi(f[7]);
    r.min_steps = std::stoi(f[8]);
    if (!f[9].empty()) {
      learning::FeatureVec w;
      for (int i = 0; i < 5; ++i) w[i] = std::stod(f[9 + static_cast<std::size_t>(i)]);
      r.weights = w;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "config,scale,variant,trials,solved,success_rate,mean_steps,min,q25,median,q75,max";
  for (const char* f : kFeatureNames) out << ",mean_w_" << f;
  out << '\n';
  for (const auto& c : cells) {
    out << c.config << ',' << c.scale << ',' << to_string(c.variant) << ',' << c.trials << ','
        << c.solved << ',' << num(c.success_rate) << ',' << num(c.mean_steps) << ','
        << num(c.min) << ',' << num(c.q25) << ',' << num(c.median) << ',' << num(c.q75) << ','
        << num(c.max);
    for (int i = 0; i < 5; ++i) out << ',' << (c.mean_weights ? num((*c.mean_weights)[i]) : "");
    out << '\n';
  }
}

void write_timings_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "experiment,config,scale,variant,trial,wall_time_ms\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.config << ',' << r.scale << ',' << to_string(r.variant) << ','
        << r.trial << ',' << r.wall_time_ms << '\n';
  }
}

void write_steps_svg(std::ostream& out, const std::vector<ResultRow>& rows,
                     const std::string& title) {
  const auto cells = summarize(rows);
  const double width = std::max(360.0, 90.0 * static_cast<double>(cells.size()) + 120.0);
  const double height = 420.0;
  const double left = 70.0, right = 20.0, top = 40.0, bottom = 90.0;
  double top_steps = 1.0;
  for (const auto& c : cells) top_steps = std::max(top_steps, c.max);
  // log axis: step counts span several decades once the DQN is included
  const double log_top = std::log10(top_steps + 1.0);
  auto y = [&](double steps) {
    return top + (height - top - bottom) * (1.0 - std::log10(steps + 1.0) / log_top);
  };
  const double slot = (width - left - right) / std::max<std::size_t>(1, cells.size());

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(title) << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  for (double tick = 1.0; tick <= top_steps * 1.0001; tick *= 10.0) {
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << y(tick) << "\" x2=\"" << width - right
        << "\" y2=\"" << y(tick) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << y(tick) + 4 << "\" text-anchor=\"end\">"
        << tick << "</text>\n";
  }
  out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
      << "\" transform=\"rotate(-90 16 " << (top + height - bottom) / 2
      << ")\" text-anchor=\"middle\">manipulation steps</text>\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const double cx = left + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(25.0, slot * 0.3);
    const char* fill = c.variant == Variant::base        ? "#9ecae1"
                       : c.variant == Variant::attention ? "#fdae6b"
                                                         : "#a1d99b";
    out << "<line x1=\"" << cx << "\" y1=\"" << y(c.min) << "\" x2=\"" << cx << "\" y2=\""
        << y(c.max) << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << cx - half << "\" y=\"" << y(c.q75) << "\" width=\"" << 2 * half
        << "\" height=\"" << std::max(0.5, y(c.q25) - y(c.q75)) << "\" fill=\"" << fill
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << cx - half << "\" y1=\"" << y(c.median) << "\" x2=\"" << cx + half
        << "\" y2=\"" << y(c.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << cx << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\">" << escape_xml(to_string(c.variant)) << "</text>\n";
    out << "<text x=\"" << cx << "\" y=\"" << height - bottom + 30
        << "\" text-anchor=\"middle\">" << escape_xml(c.config) << " n=" << c.scale
        << "</text>\n";
    out << "<text x=\"" << cx << "\" y=\"" << height - bottom + 44
        << "\" text-anchor=\"middle\">" << std::lround(100.0 * c.success_rate)
        << "% solved</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace lockbox::bench
