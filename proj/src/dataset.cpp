#include "arpf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "arpf/philox.hpp"

namespace arpf {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.x = Matrix(rows.size(), d());
  if (labels) out.labels.emplace();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = x.row(rows.at(r));
    std::copy(src.begin(), src.end(), out.x.row(r).begin());
    if (labels) out.labels->push_back((*labels)[rows[r]]);
  }
  out.source = source;
  return out;
}

std::vector<int> Dataset::classes() const {
  if (!labels) return {};
  std::set<int> s(labels->begin(), labels->end());
  return {s.begin(), s.end()};
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  Dataset data;
  data.source = path;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t width = 0, line_no = 0;
  std::optional<std::size_t> label_col;
  std::string line;
  bool skip_header = options.header;

  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    if (skip_header) {
      skip_header = false;
      continue;
    }
    const auto cells = split(line, options.delimiter);
    if (width == 0) {
      width = cells.size();
      if (options.label_column) {
        const int c = *options.label_column;
        const long idx = c < 0 ? static_cast<long>(width) + c : c;
        if (idx < 0 || idx >= static_cast<long>(width))
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": label column out of range");
        label_col = static_cast<std::size_t>(idx);
      }
      if (width - (label_col ? 1 : 0) == 0)
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": no feature columns");
    }
    if (cells.size() != width)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                               " cells, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < width; ++c) {
      const std::string cell = trim(cells[c]);
      if (label_col && c == *label_col) {
        int label = 0;
        if (!parse(cell, label))
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad label '" + cell + "'");
        labels.push_back(label);
      } else {
        double v = 0.0;
        if (!parse(cell, v) || !std::isfinite(v))
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
        values.push_back(v);
      }
    }
  }
  const std::size_t d = width - (label_col ? 1 : 0);
  if (width == 0) throw std::runtime_error(path + ": no data rows");
  data.x.rows = values.size() / d;
  data.x.cols = d;
  data.x.data = std::move(values);
  if (label_col) data.labels = std::move(labels);
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  for (std::size_t c = 0; c < data.d(); ++c) os << (c ? "," : "") << 'x' << c;
  if (data.labels) os << ",label";
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t c = 0; c < data.d(); ++c) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, data.x(i, c));
      (void)ec;
      if (c) os << ',';
      os.write(buf, end - buf);
    }
    if (data.labels) os << ',' << (*data.labels)[i];
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Dataset synth_gaussian_mixture(const MixtureSpec& spec) {
  if (spec.classes < 1 || spec.components < 1 || spec.d < 1 || spec.n < 1)
    throw std::invalid_argument("mixture: counts must be positive");
  const std::size_t total = static_cast<std::size_t>(spec.classes) * spec.components;

  // Centres by rejection sampling; the separation is relaxed if the box is
  // too crowded to honour it.
  PhiloxStream centre_rng(spec.seed, 0);
  Matrix centres(total, spec.d);
  double separation = spec.min_separation;
  for (std::size_t c = 0; c < total; ++c) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 0 && attempt % 1000 == 0) separation *= 0.9;
      for (std::size_t k = 0; k < spec.d; ++k)
        centres(c, k) = spec.center_range * (2.0 * centre_rng.uniform_open() - 1.0);
      bool ok = true;
      for (std::size_t o = 0; o < c && ok; ++o) {
        double dist2 = 0.0;
        for (std::size_t k = 0; k < spec.d; ++k) dist2 += std::pow(centres(c, k) - centres(o, k), 2);
        ok = dist2 >= separation * separation;
      }
      if (ok) break;
    }
  }

  Dataset data;
  data.source = "synth";
  data.x = Matrix(spec.n, spec.d);
  data.labels.emplace(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    PhiloxStream rng(spec.seed, 1 + i);
    const int label = static_cast<int>(i % spec.classes);
    const auto comp = static_cast<std::size_t>(rng.next_u32() % static_cast<std::uint32_t>(spec.components));
    const std::size_t centre = static_cast<std::size_t>(label) * spec.components + comp;
    for (std::size_t k = 0; k < spec.d; ++k) data.x(i, k) = centres(centre, k) + spec.component_std * rng.normal();
    (*data.labels)[i] = label;
  }
  return data;
}

}  // namespace arpf
