#ifndef NAVSEED_REPORT_HPP
#define NAVSEED_REPORT_HPP

#include <cstdio>
#include <map>
#include <string>

#include "navseed/eval.hpp"

namespace navseed::eval {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_write(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  return f;
}

inline const char* outcome_name(TerminalKind k) {
  switch (k) {
    case TerminalKind::None: return "none";
    case TerminalKind::Arrived: return "arrived";
    case TerminalKind::Collided: return "collided";
    case TerminalKind::Timeout: return "timeout";
  }
  return "?";
}

}  // namespace detail

// Train-log CSV. Update rows carry step/losses; an episode row follows the
// update row of the step it ended on.
// Columns: step,episode,critic_loss,actor_loss,episode_reward,arrive_reward,
//          distance_reward,outcome,env_steps
inline void emit_csv(const TrainLog& log, const std::string& path) {
  auto f = detail::open_write(path);
  std::fprintf(f.get(),
               "step,episode,critic_loss,actor_loss,episode_reward,arrive_reward,"
               "distance_reward,outcome,env_steps\n");
  size_t ep = 0;
  for (const auto& u : log.updates) {
    std::fprintf(f.get(), "%lld,,%s,", static_cast<long long>(u.step),
                 format_number(u.critic_loss).c_str());
    if (u.actor_loss) std::fprintf(f.get(), "%s", format_number(*u.actor_loss).c_str());
    std::fprintf(f.get(), ",,,,,\n");
    while (ep < log.episodes.size() && log.episodes[ep].env_steps == u.step) {
      const auto& e = log.episodes[ep];
      std::fprintf(f.get(), ",%d,,,%s,%s,%s,%s,%lld\n", e.episode,
                   format_number(e.total_reward).c_str(), format_number(e.arrive_reward).c_str(),
                   format_number(e.distance_reward).c_str(), detail::outcome_name(e.outcome),
                   static_cast<long long>(e.env_steps));
      ++ep;
    }
  }
  // episodes recorded without update rows (zero-budget runs)
  for (; ep < log.episodes.size(); ++ep) {
    const auto& e = log.episodes[ep];
    std::fprintf(f.get(), ",%d,,,%s,%s,%s,%s,%lld\n", e.episode,
                 format_number(e.total_reward).c_str(), format_number(e.arrive_reward).c_str(),
                 format_number(e.distance_reward).c_str(), detail::outcome_name(e.outcome),
                 static_cast<long long>(e.env_steps));
  }
}

/// Per-episode evaluation rows; the summary is recomputable from them.
inline void emit_csv(const EvalMetrics& m, const std::string& path) {
  auto f = detail::open_write(path);
  std::fprintf(f.get(), "episode,outcome,total_reward,steps\n");
  for (const auto& r : m.rows)
    std::fprintf(f.get(), "%d,%s,%s,%d\n", r.episode, detail::outcome_name(r.outcome),
                 format_number(r.total_reward).c_str(), r.steps);
}

/// Reads an eval CSV back into metrics (round-trip check and tooling).
inline EvalMetrics read_eval_csv(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<EvalEpisode> rows;
  char line[512];
  bool header = true;
  while (std::fgets(line, sizeof(line), f)) {
    if (header) {
      header = false;
      continue;
    }
    EvalEpisode e;
    char outcome[32];
    if (std::sscanf(line, "%d,%31[^,],%f,%d", &e.episode, outcome, &e.total_reward, &e.steps) == 4) {
      std::string o(outcome);
      e.outcome = o == "arrived"    ? TerminalKind::Arrived
                  : o == "collided" ? TerminalKind::Collided
                  : o == "timeout"  ? TerminalKind::Timeout
                                    : TerminalKind::None;
      rows.push_back(e);
    }
  }
  std::fclose(f);
  return metrics_from_rows(std::move(rows));
}

// Comparison report CSV: one row per run plus per-group mean rows. Wall times
// stay out of the CSV so reruns are byte-identical; they go to the timing
// sidecar instead.
inline void emit_csv(const ComparisonReport& report, const std::string& path) {
  auto f = detail::open_write(path);
  std::fprintf(f.get(),
               "label,kind,algo,mode,seed,min_loss,max_loss,end_loss,steps_to_convergence,"
               "final5_reward,last20_success_rate,steps_to_success06,episodes,env_steps,"
               "expert_rows,config_hash\n");
  auto row = [&](const RunReport& r, bool aggregate) {
    std::fprintf(f.get(), "%s,%s,%s,%s,", r.label.c_str(), r.kind.c_str(), r.algo.c_str(),
                 r.mode.c_str());
    if (!aggregate) std::fprintf(f.get(), "%llu", static_cast<unsigned long long>(r.seed));
    std::fprintf(f.get(), ",%s,%s,%s,", format_number(r.min_loss).c_str(),
                 format_number(r.max_loss).c_str(), format_number(r.end_loss).c_str());
    if (r.steps_to_convergence)
      std::fprintf(f.get(), "%lld", static_cast<long long>(*r.steps_to_convergence));
    std::fprintf(f.get(), ",%s,%s,", format_number(r.final5_reward).c_str(),
                 format_number(r.last20_success).c_str());
    if (r.steps_to_success06)
      std::fprintf(f.get(), "%lld", static_cast<long long>(*r.steps_to_success06));
    std::fprintf(f.get(), ",%d,%lld,%lld,%s\n", r.episodes, static_cast<long long>(r.env_steps),
                 static_cast<long long>(r.expert_rows), r.config_hash.c_str());
  };
  for (const auto& r : report.runs) row(r, false);

  // aggregate means per (kind, algo, mode) group
  std::map<std::string, std::pair<RunReport, int>> groups;
  for (const auto& r : report.runs) {
    std::string key = r.kind + "/" + r.algo + "/" + r.mode;
    auto [it, fresh] = groups.try_emplace(key);
    RunReport& g = it->second.first;
    if (fresh) {
      g = r;
      g.label = key + "/mean";
      g.steps_to_convergence.reset();
      g.steps_to_success06.reset();
      g.min_loss = g.max_loss = g.end_loss = g.final5_reward = g.last20_success = 0.0;
      g.episodes = 0;
      g.expert_rows = 0;
    }
    g.min_loss += r.min_loss;
    g.max_loss += r.max_loss;
    g.end_loss += r.end_loss;
    g.final5_reward += r.final5_reward;
    g.last20_success += r.last20_success;
    g.episodes += r.episodes;
    g.expert_rows += r.expert_rows;
    it->second.second += 1;
  }
  for (auto& [key, entry] : groups) {
    RunReport& g = entry.first;
    int n = entry.second;
    g.min_loss /= n;
    g.max_loss /= n;
    g.end_loss /= n;
    g.final5_reward /= n;
    g.last20_success /= n;
    g.episodes /= n;
    g.expert_rows /= n;
    row(g, true);
  }
}

/// Wall-clock sidecar for a comparison report (not part of the CSV contract).
inline void emit_timing(const ComparisonReport& report, const std::string& path) {
  auto f = detail::open_write(path);
  for (const auto& r : report.runs)
    std::fprintf(f.get(), "%s %.3f s\n", r.label.c_str(), r.wall_time_sec);
}

// ---------------------------------------------------------------------------
// SVG line charts

struct Curve {
  std::string label;
  std::vector<SeriesPoint> points;
};

// Simple multi-series line chart: fixed viewport, axis frame with min/max
// labels, one polyline per curve, legend in the top-right corner.
inline void emit_svg_curves(const std::vector<Curve>& curves, const std::string& path,
                            const std::string& title = "") {
  const int W = 900, H = 520;
  const double ml = 70, mr = 220, mt = 40, mb = 50;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      xmin = std::min(xmin, static_cast<double>(p.step));
      xmax = std::max(xmax, static_cast<double>(p.step));
      ymin = std::min(ymin, p.value);
      ymax = std::max(ymax, p.value);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (ymax == ymin) {
    ymax += 1;
    ymin -= 1;
  }
  if (xmax == xmin) xmax += 1;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  auto f = detail::open_write(path);
  std::fprintf(f.get(),
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
               "viewBox=\"0 0 %d %d\">\n",
               W, H, W, H);
  std::fprintf(f.get(), "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", W, H);
  if (!title.empty())
    std::fprintf(f.get(),
                 "<text x=\"%g\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
                 ml, title.c_str());
  std::fprintf(f.get(),
               "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
               "stroke=\"black\"/>\n",
               ml, mt, W - ml - mr, H - mt - mb);
  auto axis_label = [&](double x, double y, const std::string& text, const char* anchor) {
    std::fprintf(f.get(),
                 "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" "
                 "text-anchor=\"%s\">%s</text>\n",
                 x, y, anchor, text.c_str());
  };
  axis_label(ml, H - mb + 18, format_number(xmin), "middle");
  axis_label(W - mr, H - mb + 18, format_number(xmax), "middle");
  axis_label(ml - 8, H - mb, format_number(ymin), "end");
  axis_label(ml - 8, mt + 12, format_number(ymax), "end");

  for (size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c];
    if (curve.points.empty()) continue;
    size_t stride = std::max<size_t>(1, curve.points.size() / 800);
    std::string pts;
    for (size_t i = 0; i < curve.points.size(); i += stride) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(curve.points[i].step),
                    py(curve.points[i].value));
      pts += buf;
    }
    const char* color = palette[c % (sizeof(palette) / sizeof(palette[0]))];
    std::fprintf(f.get(),
                 "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"%s\"/>\n",
                 color, pts.c_str());
    double ly = mt + 18 + 18 * static_cast<double>(c);
    std::fprintf(f.get(), "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
                          "stroke-width=\"3\"/>\n",
                 W - mr + 14, ly - 4, W - mr + 38, ly - 4, color);
    std::fprintf(f.get(),
                 "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                 W - mr + 44, ly, curve.label.c_str());
  }
  std::fprintf(f.get(), "</svg>\n");
}

/// Loss or reward curves for a set of runs, one curve per run label.
inline void emit_svg_curves(const ComparisonReport& report, const std::string& metric,
                            const std::string& path) {
  std::vector<Curve> curves;
  for (size_t i = 0; i < report.runs.size(); ++i) {
    Curve c;
    c.label = report.runs[i].label;
    c.points = extract_series(report.logs[i], metric);
    curves.push_back(std::move(c));
  }
  emit_svg_curves(curves, path, metric);
}

}  // namespace navseed::eval

#endif  // NAVSEED_REPORT_HPP
