#include "trafficlab/plots.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "trafficlab/errors.h"
#include "trafficlab/metrics.h"

namespace trafficlab {

namespace {

struct RunSeries {
    std::string name;
    std::vector<double> episodeUtility;
    std::vector<double> agentCongestion;  // final-window mean per agent
    double selfishIndex = 0.0;
    double finalUtility = 0.0;
};

std::vector<std::string> splitCsvLine(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

RunSeries loadRun(const std::filesystem::path &dir) {
    std::ifstream in(dir / "metrics.csv");
    if (!in) throw IoError("no metrics.csv in " + dir.string());
    std::string header;
    std::getline(in, header);
    // column layout written by MetricsWriter
    std::map<int, std::pair<double, int>> perEpisode;  // sum, count (agent 0)
    std::map<int, std::pair<double, int>> perAgentCongestion;
    int maxEpisode = -1;
    std::string line;
    std::vector<std::array<double, 3>> rows;  // episode, agent, reward
    std::vector<double> groupCol;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = splitCsvLine(line);
        if (f.size() < 9) throw IoError("short metrics row in " + dir.string());
        int episode = std::stoi(f[0]);
        int agent = std::stoi(f[2]);
        double reward = std::stod(f[3]);
        double util = std::stod(f[5]);
        maxEpisode = std::max(maxEpisode, episode);
        if (agent == 0) {
            auto &acc = perEpisode[episode];
            acc.first += util;
            acc.second += 1;
        }
        rows.push_back({static_cast<double>(episode),
                        static_cast<double>(agent), reward});
    }
    if (maxEpisode < 1)
        throw IoError("metrics in " + dir.string() +
                      " are too short to plot (need >= 2 episodes)");
    RunSeries s;
    s.name = dir.filename().string();
    s.episodeUtility.resize(maxEpisode + 1, 0.0);
    for (auto &[e, acc] : perEpisode)
        s.episodeUtility[e] = acc.first / acc.second;
    int window = std::max(1, (maxEpisode + 1 + 9) / 10);
    for (const auto &r : rows) {
        int e = static_cast<int>(r[0]);
        if (e < maxEpisode + 1 - window) continue;
        auto &acc = perAgentCongestion[static_cast<int>(r[1])];
        acc.first += -r[2];
        acc.second += 1;
    }
    for (auto &[agent, acc] : perAgentCongestion)
        s.agentCongestion.push_back(acc.first / acc.second);
    double sum = 0;
    for (int e = maxEpisode + 1 - window; e <= maxEpisode; ++e)
        sum += s.episodeUtility[e];
    s.finalUtility = sum / window;

    std::ifstream cfgIn(dir / "resolved_config.json");
    if (cfgIn) {
        try {
            nlohmann::json cfg;
            cfgIn >> cfg;
            s.selfishIndex = cfg.value("selfish_index", 0.0);
        } catch (const nlohmann::json::exception &) {
            // config unreadable: selfish plot just skips this run
        }
    }
    return s;
}

std::vector<double> movingAverage(const std::vector<double> &v, int window) {
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        size_t lo = i >= static_cast<size_t>(window - 1) ? i - (window - 1) : 0;
        double sum = 0;
        for (size_t j = lo; j <= i; ++j) sum += v[j];
        out[i] = sum / static_cast<double>(i - lo + 1);
    }
    return out;
}

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

class SvgCanvas {
public:
    SvgCanvas(int width, int height) : w(width), h(height) {
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
           << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
           << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    void line(double x1, double y1, double x2, double y2,
              const std::string &stroke, double width = 1.0) {
        os << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
           << "\" y2=\"" << y2 << "\" stroke=\"" << stroke
           << "\" stroke-width=\"" << width << "\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>> &pts,
                  const std::string &stroke) {
        os << "<polyline fill=\"none\" stroke=\"" << stroke
           << "\" stroke-width=\"1.5\" points=\"";
        for (auto &[x, y] : pts) os << x << "," << y << " ";
        os << "\"/>\n";
    }
    void rect(double x, double y, double rw, double rh,
              const std::string &fill) {
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << rw
           << "\" height=\"" << rh << "\" fill=\"" << fill << "\"/>\n";
    }
    void circle(double x, double y, double r, const std::string &fill) {
        os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r
           << "\" fill=\"" << fill << "\"/>\n";
    }
    void text(double x, double y, const std::string &s, int size = 11,
              const std::string &anchor = "start") {
        os << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
           << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">"
           << escape(s) << "</text>\n";
    }
    void save(const std::filesystem::path &path) {
        os << "</svg>\n";
        std::ofstream out(path);
        if (!out) throw IoError("cannot write plot " + path.string());
        out << os.str();
    }

private:
    static std::string escape(const std::string &s) {
        std::string out;
        for (char c : s) {
            if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else if (c == '&') out += "&amp;";
            else out += c;
        }
        return out;
    }
    int w, h;
    std::ostringstream os;
};

struct Axes {
    double x0 = 60, y0 = 40, x1 = 720, y1 = 420;  // plot area
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    double px(double x) const {
        return x0 + (x - xmin) / (xmax - xmin + 1e-300) * (x1 - x0);
    }
    double py(double y) const {
        return y1 - (y - ymin) / (ymax - ymin + 1e-300) * (y1 - y0);
    }
};

void drawFrame(SvgCanvas &svg, const Axes &ax, const std::string &xlabel,
               const std::string &ylabel, const std::string &title) {
    svg.line(ax.x0, ax.y1, ax.x1, ax.y1, "#333");
    svg.line(ax.x0, ax.y0, ax.x0, ax.y1, "#333");
    for (int i = 0; i <= 5; ++i) {
        double fx = ax.xmin + (ax.xmax - ax.xmin) * i / 5.0;
        double fy = ax.ymin + (ax.ymax - ax.ymin) * i / 5.0;
        svg.line(ax.px(fx), ax.y1, ax.px(fx), ax.y1 + 4, "#333");
        svg.text(ax.px(fx), ax.y1 + 16, formatDouble(std::round(fx * 100) / 100),
                 10, "middle");
        svg.line(ax.x0 - 4, ax.py(fy), ax.x0, ax.py(fy), "#333");
        svg.text(ax.x0 - 6, ax.py(fy) + 3, formatDouble(std::round(fy * 100) / 100),
                 10, "end");
    }
    svg.text((ax.x0 + ax.x1) / 2, ax.y1 + 32, xlabel, 12, "middle");
    svg.text(14, (ax.y0 + ax.y1) / 2, ylabel, 12, "middle");
    svg.text((ax.x0 + ax.x1) / 2, 20, title, 13, "middle");
}

}  // namespace

std::vector<std::filesystem::path> emitPlots(
    const std::vector<std::filesystem::path> &runDirs,
    const std::filesystem::path &outDir) {
    if (runDirs.empty()) throw InvalidArgument("no run directories given");
    std::vector<RunSeries> runs;
    for (const auto &dir : runDirs) runs.push_back(loadRun(dir));
    std::filesystem::create_directories(outDir);
    std::vector<std::filesystem::path> written;

    {  // learning curves, smoothed, shared axes
        SvgCanvas svg(780, 470);
        Axes ax;
        ax.xmax = 1;
        double ymin = 0, ymax = -1e300;
        for (const auto &r : runs) {
            ax.xmax = std::max(ax.xmax,
                               static_cast<double>(r.episodeUtility.size() - 1));
            for (double v : r.episodeUtility) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
        ax.ymin = ymin;
        ax.ymax = ymax >= ymin ? std::max(ymax, ymin + 1e-9) : ymin + 1;
        drawFrame(svg, ax, "episode", "group utility",
                  "learning curve (window-5 moving average)");
        for (size_t i = 0; i < runs.size(); ++i) {
            auto smooth = movingAverage(runs[i].episodeUtility, 5);
            std::vector<std::pair<double, double>> pts;
            for (size_t e = 0; e < smooth.size(); ++e)
                pts.emplace_back(ax.px(static_cast<double>(e)),
                                 ax.py(smooth[e]));
            const char *color = kPalette[i % 8];
            svg.polyline(pts, color);
            svg.rect(ax.x1 - 180, ax.y0 + 8 + 16 * i, 10, 10, color);
            svg.text(ax.x1 - 166, ax.y0 + 17 + 16 * i, runs[i].name, 11);
        }
        auto path = outDir / "learning_curve.svg";
        svg.save(path);
        written.push_back(path);
    }

    for (const auto &r : runs) {  // per-agent congestion bars
        SvgCanvas svg(780, 470);
        Axes ax;
        ax.xmax = static_cast<double>(r.agentCongestion.size());
        ax.ymin = 0;
        ax.ymax = 1e-9;
        for (double c : r.agentCongestion) ax.ymax = std::max(ax.ymax, c);
        drawFrame(svg, ax, "agent", "mean congestion (final 10% episodes)",
                  "per-agent congestion: " + r.name);
        for (size_t a = 0; a < r.agentCongestion.size(); ++a) {
            double x = ax.px(static_cast<double>(a) + 0.15);
            double x2 = ax.px(static_cast<double>(a) + 0.85);
            double y = ax.py(r.agentCongestion[a]);
            svg.rect(x, y, x2 - x, ax.y1 - y, kPalette[a % 8]);
            svg.text((x + x2) / 2, ax.y1 + 16, std::to_string(a), 10, "middle");
        }
        auto path = outDir / ("congestion_" + r.name + ".svg");
        svg.save(path);
        written.push_back(path);
    }

    {  // selfish index vs final utility, when the sweep dimension exists
        std::map<double, double> byIndex;
        for (const auto &r : runs) byIndex[r.selfishIndex] = r.finalUtility;
        if (byIndex.size() >= 2) {
            SvgCanvas svg(780, 470);
            Axes ax;
            ax.xmin = byIndex.begin()->first;
            ax.xmax = byIndex.rbegin()->first;
            ax.ymin = 1e300;
            ax.ymax = -1e300;
            for (auto &[k, v] : byIndex) {
                ax.ymin = std::min(ax.ymin, v);
                ax.ymax = std::max(ax.ymax, v);
            }
            if (ax.ymax <= ax.ymin) ax.ymax = ax.ymin + 1;
            drawFrame(svg, ax, "selfish index", "final mean group utility",
                      "selfish index vs final utility");
            std::vector<std::pair<double, double>> pts;
            for (auto &[k, v] : byIndex)
                pts.emplace_back(ax.px(k), ax.py(v));
            svg.polyline(pts, kPalette[0]);
            for (auto &[x, y] : pts) svg.circle(x, y, 3, kPalette[1]);
            auto path = outDir / "selfish_curve.svg";
            svg.save(path);
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace trafficlab
