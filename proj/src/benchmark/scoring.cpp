#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "shiwa/benchmark.hpp"

namespace shiwa {

namespace {

using ProblemKey = std::tuple<std::string, std::string, std::size_t, std::size_t, std::size_t, bool, bool, std::uint64_t>;

ProblemKey key_of(const ResultRow& r) {
  return {r.benchmark, r.function, r.dimension, r.budget, r.parallelism, r.rotated, r.noisy, r.seed};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_value(const std::string& text, std::size_t line) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw CsvError(line, "invalid value '" + text + "'");
  }
  return value;
}

std::string escape_xml(const std::string& s) {
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

}  // namespace

std::vector<std::size_t> ScoreMatrix::ranking() const {
  std::vector<std::size_t> order(optimizers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    const double sa = std::isnan(mean_score[a]) ? -1.0 : mean_score[a];
    const double sb = std::isnan(mean_score[b]) ? -1.0 : mean_score[b];
    if (sa != sb) return sa > sb;
    return optimizers[a] < optimizers[b];
  });
  return order;
}

ScoreMatrix score(const std::vector<ResultRow>& rows) {
  std::vector<std::string> names;
  std::map<std::string, std::map<ProblemKey, double>> losses;
  for (const ResultRow& r : rows) {
    if (std::find(names.begin(), names.end(), r.optimizer) == names.end()) names.push_back(r.optimizer);
    if (r.status != RunStatus::Ok) continue;
    losses[r.optimizer].emplace(key_of(r), r.loss);
  }
  if (names.size() < 2) throw NoOverlap("scoring needs at least two optimizers");
  std::sort(names.begin(), names.end());

  const std::size_t n = names.size();
  ScoreMatrix m;
  m.optimizers = names;
  m.wins.assign(n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
  m.shared.assign(n * n, 0);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    m.wins[i][i] = 0.5;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = losses[names[i]];
      const auto& b = losses[names[j]];
      std::size_t shared = 0, wins_i = 0, wins_j = 0, ties = 0;
      for (const auto& [key, la] : a) {
        const auto it = b.find(key);
        if (it == b.end()) continue;
        ++shared;
        if (la < it->second) {
          ++wins_i;
        } else if (it->second < la) {
          ++wins_j;
        } else {
          ++ties;
        }
      }
      m.shared[i * n + j] = m.shared[j * n + i] = shared;
      if (shared == 0) continue;
      any = true;
      // The larger share is computed and the other is its exact complement,
      // so the pair always sums to 1.
      const double half = 0.5 * static_cast<double>(ties);
      const double total = static_cast<double>(shared);
      if (wins_i >= wins_j) {
        m.wins[i][j] = (static_cast<double>(wins_i) + half) / total;
        m.wins[j][i] = 1.0 - m.wins[i][j];
      } else {
        m.wins[j][i] = (static_cast<double>(wins_j) + half) / total;
        m.wins[i][j] = 1.0 - m.wins[j][i];
      }
    }
  }
  if (!any) throw NoOverlap("no pair of optimizers shares a successful run");

  m.mean_score.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || std::isnan(m.wins[i][j])) continue;
      sum += m.wins[i][j];
      ++count;
    }
    if (count > 0) m.mean_score[i] = sum / static_cast<double>(count);
  }
  return m;
}

void write_score_csv(std::ostream& out, const ScoreMatrix& m) {
  const auto order = m.ranking();
  out << "optimizer,mean_score";
  for (std::size_t j : order) out << ',' << m.optimizers[j];
  out << "\n";
  for (std::size_t i : order) {
    out << m.optimizers[i] << ',' << format_double(m.mean_score[i]);
    for (std::size_t j : order) out << ',' << format_double(m.wins[i][j]);
    out << "\n";
  }
}

ScoreMatrix read_score_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError(1, "empty file, expected a header");
  auto header = split(line);
  if (header.size() < 4 || header[0] != "optimizer" || header[1] != "mean_score") {
    throw CsvError(1, "unexpected header '" + line + "'");
  }
  ScoreMatrix m;
  m.optimizers.assign(header.begin() + 2, header.end());
  const std::size_t n = m.optimizers.size();
  m.wins.assign(n, std::vector<double>(n));
  m.mean_score.assign(n, 0.0);
  m.shared.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw CsvError(i + 2, "missing row for " + m.optimizers[i]);
    const auto f = split(line);
    if (f.size() != n + 2) throw CsvError(i + 2, "expected " + std::to_string(n + 2) + " fields");
    if (f[0] != m.optimizers[i]) throw CsvError(i + 2, "row order does not match the header");
    m.mean_score[i] = parse_value(f[1], i + 2);
    for (std::size_t j = 0; j < n; ++j) m.wins[i][j] = parse_value(f[j + 2], i + 2);
  }
  return m;
}

void write_score_svg(std::ostream& out, const ScoreMatrix& m) {
  const auto order = m.ranking();
  const std::size_t n = order.size();
  constexpr int cell = 48;
  constexpr int left = 240;
  constexpr int top = 160;
  const int width = left + static_cast<int>(n) * cell + 20;
  const int height = top + static_cast<int>(n) * cell + 20;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t c = 0; c < n; ++c) {
    const int x = left + static_cast<int>(c) * cell + cell / 2;
    out << "  <text x=\"" << x << "\" y=\"" << top - 8 << "\" transform=\"rotate(-60 " << x << ' ' << top - 8
        << ")\">" << escape_xml(m.optimizers[order[c]]) << "</text>\n";
  }
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    const int y = top + static_cast<int>(r) * cell;
    out << "  <text x=\"" << left - 8 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
        << escape_xml(m.optimizers[i]) << " (" << format_double(std::round(m.mean_score[i] * 1000.0) / 10.0)
        << "%)</text>\n";
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t j = order[c];
      const double v = m.wins[i][j];
      const int grey = std::isnan(v) ? 128 : static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      const int x = left + static_cast<int>(c) * cell;
      out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"rgb(" << grey << ',' << grey << ',' << grey << ")\" data-row=\"" << escape_xml(m.optimizers[i])
          << "\" data-col=\"" << escape_xml(m.optimizers[j]) << "\" data-value=\"" << format_double(v) << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace shiwa
