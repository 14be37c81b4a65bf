#include "seqsandbox/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

namespace seqsandbox {

namespace {

std::string fmt(double x, const char* spec = "%.17g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
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

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using SeriesKey = std::pair<std::string, std::string>;  // explorer, model

std::map<SeriesKey, std::vector<const RunLog*>> by_series(const LandscapeGroup& g) {
  std::map<SeriesKey, std::vector<const RunLog*>> out;
  for (const auto* log : g.logs) out[{explorer_key(*log), model_key(*log)}].push_back(log);
  return out;
}

std::vector<MeanSd> mean_cummax(const std::vector<const RunLog*>& logs) {
  std::size_t rounds = 0;
  for (const auto* l : logs) rounds = std::max(rounds, metric_cummax(*l).size());
  std::vector<MeanSd> out;
  for (std::size_t t = 0; t < rounds; ++t) {
    std::vector<double> v;
    for (const auto* l : logs) {
      const auto c = metric_cummax(*l);
      if (t < c.size()) v.push_back(c[t]);
    }
    out.push_back(mean_sd(v));
  }
  return out;
}

}  // namespace

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd m;
  m.n = values.size();
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(m.n);
  if (m.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(m.n - 1));
  }
  return m;
}

std::string format_mean_sd(const MeanSd& m) {
  if (m.n <= 1) return fmt(m.mean, "%.4g");
  return fmt(m.mean, "%.4g") + " ± " + fmt(m.sd, "%.3g");
}

std::string explorer_key(const RunLog& log) { return log.config.at("explorer").at("type").get<std::string>(); }

std::string model_key(const RunLog& log) {
  const auto& m = log.config.at("model");
  const auto type = m.at("type").get<std::string>();
  if (type == "abstract") return "abstract(alpha=" + fmt(m.at("alpha").get<double>(), "%g") + ")";
  return type;
}

std::vector<LandscapeGroup> group_by_landscape(const std::vector<RunLog>& logs) {
  std::vector<LandscapeGroup> groups;
  for (const auto& log : logs) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const LandscapeGroup& g) { return g.landscape == log.landscape_name; });
    if (it == groups.end()) {
      groups.push_back({log.landscape_name, {}});
      it = groups.end() - 1;
    }
    it->logs.push_back(&log);
  }
  return groups;
}

void write_cummax_csv(std::ostream& out, const std::vector<LandscapeGroup>& groups) {
  out << "landscape,explorer,model,round,mean,sd,n\n";
  for (const auto& g : groups) {
    for (const auto& [key, logs] : by_series(g)) {
      const auto series = mean_cummax(logs);
      for (std::size_t t = 0; t < series.size(); ++t) {
        out << csv_field(g.landscape) << ',' << key.first << ',' << csv_field(key.second) << ',' << t << ','
            << fmt(series[t].mean) << ',' << fmt(series[t].sd) << ',' << series[t].n << '\n';
      }
    }
  }
}

void write_optima_table(std::ostream& out, const std::vector<LandscapeGroup>& groups) {
  std::set<std::string> explorer_set;
  for (const auto& g : groups) {
    for (const auto* l : g.logs) explorer_set.insert(explorer_key(*l));
  }
  const std::vector<std::string> explorers(explorer_set.begin(), explorer_set.end());
  out << "landscape,y_tau,model,optima_available";
  for (const auto& e : explorers) out << ',' << e;
  out << '\n';
  const std::string prefix = "optima_found_";
  for (const auto& g : groups) {
    // (label, model) -> explorer -> final counts
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>> cells;
    std::map<std::string, std::size_t> available;
    for (const auto* l : g.logs) {
      for (const auto& m : l->metrics) {
        if (m.name.rfind(prefix, 0) != 0 || m.values.empty()) continue;
        const auto label = m.name.substr(prefix.size());
        cells[{label, model_key(*l)}][explorer_key(*l)].push_back(m.values.back());
        if (l->optima_available && l->optima_available->count(label)) available[label] = l->optima_available->at(label);
      }
    }
    for (const auto& [row, by_explorer] : cells) {
      out << csv_field(g.landscape) << ',' << csv_field(row.first) << ',' << csv_field(row.second) << ',';
      if (available.count(row.first)) out << available.at(row.first);
      for (const auto& e : explorers) {
        out << ',';
        if (auto it = by_explorer.find(e); it != by_explorer.end()) out << csv_field(format_mean_sd(mean_sd(it->second)));
      }
      out << '\n';
    }
  }
}

void write_cummax_svg(std::ostream& out, const LandscapeGroup& group) {
  constexpr double width = 640, height = 400, left = 60, right = 200, top = 40, bottom = 50;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const auto series = by_series(group);
  std::vector<std::pair<std::string, std::vector<MeanSd>>> lines;
  std::size_t rounds = 1;
  double ymin = 1.0, ymax = 0.0;
  for (const auto& [key, logs] : series) {
    auto s = mean_cummax(logs);
    rounds = std::max(rounds, s.size());
    for (const auto& p : s) {
      ymin = std::min(ymin, p.mean);
      ymax = std::max(ymax, p.mean);
    }
    lines.emplace_back(key.first + " / " + key.second, std::move(s));
  }
  if (ymin > ymax) ymin = 0.0, ymax = 1.0;
  ymin = std::max(0.0, std::floor(ymin * 10.0) / 10.0);
  ymax = std::min(1.0, std::ceil(ymax * 10.0) / 10.0);
  if (ymax <= ymin) ymax = ymin + 0.1;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](std::size_t t) { return left + pw * (rounds > 1 ? static_cast<double>(t) / static_cast<double>(rounds - 1) : 0.0); };
  auto py = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<!-- landscape: " << xml_escape(group.landscape) << "; runs: " << group.logs.size() << " -->\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">cumulative max fitness: " << xml_escape(group.landscape)
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = ymin + (ymax - ymin) * i / 5.0;
    out << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py(y) + 4, "%.2f") << "\" text-anchor=\"end\">"
        << fmt(y, "%.2f") << "</text>\n";
  }
  const std::size_t step = std::max<std::size_t>(1, (rounds - 1) / 10 + ((rounds - 1) % 10 ? 1 : 0));
  for (std::size_t t = 0; t < rounds; t += step) {
    out << "<text x=\"" << fmt(px(t), "%.2f") << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << t
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">round</text>\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t t = 0; t < lines[i].second.size(); ++t) {
      out << (t ? " " : "") << fmt(px(t), "%.2f") << ',' << fmt(py(lines[i].second[t].mean), "%.2f");
    }
    out << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i);
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4 << "\">" << xml_escape(lines[i].first) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace seqsandbox
