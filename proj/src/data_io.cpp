#include "lupi/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace lupi {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  return out;
}

double parse_double(std::string_view token, std::size_t line) {
  if (token.size() > 1 && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInput("line " + std::to_string(line) + ": cannot parse number '" + std::string(token) + "'");
  }
  return v;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

struct Entry {
  Eigen::Index col;
  double value;
};

std::vector<double> read_column(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream fields(line);
    std::string token, extra;
    fields >> token;
    if (fields >> extra) throw InvalidInput("line " + std::to_string(lineno) + ": expected a single value");
    values.push_back(parse_double(token, lineno));
  }
  return values;
}

}  // namespace

Dataset read_sparse(std::istream& in, Eigen::Index min_dim) {
  std::vector<double> labels;
  std::vector<std::vector<Entry>> rows;
  Eigen::Index dim = min_dim;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    const double label = parse_double(token, lineno);
    if (label != 1.0 && label != -1.0) {
      throw InvalidInput("line " + std::to_string(lineno) + ": label must be -1 or +1");
    }
    std::vector<Entry> entries;
    while (fields >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw InvalidInput("line " + std::to_string(lineno) + ": expected index:value, got '" + token + "'");
      }
      const double idx = parse_double(std::string_view(token).substr(0, colon), lineno);
      if (idx < 1 || idx != std::floor(idx)) {
        throw InvalidInput("line " + std::to_string(lineno) + ": feature indices are 1-based integers");
      }
      const double value = parse_double(std::string_view(token).substr(colon + 1), lineno);
      if (!std::isfinite(value)) throw InvalidInput("line " + std::to_string(lineno) + ": non-finite value");
      const auto col = static_cast<Eigen::Index>(idx) - 1;
      dim = std::max(dim, col + 1);
      entries.push_back({col, value});
    }
    labels.push_back(label);
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw InvalidInput("data file contains no instances");
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), dim);
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = labels[i];
    for (const auto& e : rows[i]) x(static_cast<Eigen::Index>(i), e.col) = e.value;
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset read_sparse_file(const std::string& path, Eigen::Index min_dim) {
  auto in = open_in(path);
  return read_sparse(in, min_dim);
}

void write_sparse(std::ostream& out, const Dataset& data) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << (data.y()[i] > 0 ? "+1" : "-1");
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      if (data.x()(i, j) != 0.0) out << ' ' << (j + 1) << ':' << data.x()(i, j);
    }
    out << '\n';
  }
}

void write_sparse_file(const std::string& path, const Dataset& data) {
  auto out = open_out(path);
  write_sparse(out, data);
}

PrivilegedSet read_privileged_file(const std::string& path, const Dataset& data) {
  const Dataset priv = read_sparse_file(path);
  if (priv.size() != data.size()) {
    throw InvalidInput("privileged file '" + path + "' has " + std::to_string(priv.size()) +
                       " lines, data has " + std::to_string(data.size()));
  }
  if (priv.y() != data.y()) throw InvalidInput("privileged file labels do not match the data labels");
  return PrivilegedSet(priv.x());
}

Vector read_weights(std::istream& in) {
  const auto values = read_column(in);
  Vector c(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw InvalidInput("weight on line " + std::to_string(i + 1) + " is not a finite nonnegative number");
    }
    c[static_cast<Eigen::Index>(i)] = values[i];
  }
  return c;
}

Vector read_weights_file(const std::string& path) {
  auto in = open_in(path);
  return read_weights(in);
}

void write_weights(std::ostream& out, const Vector& c) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < c.size(); ++i) out << c[i] << '\n';
}

void write_weights_file(const std::string& path, const Vector& c) {
  auto out = open_out(path);
  write_weights(out, c);
}

Vector read_scores(std::istream& in) {
  const auto values = read_column(in);
  Vector eta(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(std::abs(values[i]) <= 1.0)) {
      throw InvalidInput("score on line " + std::to_string(i + 1) + " is outside [-1,1]");
    }
    eta[static_cast<Eigen::Index>(i)] = values[i];
  }
  return eta;
}

Vector read_scores_file(const std::string& path) {
  auto in = open_in(path);
  return read_scores(in);
}

void write_scores_file(const std::string& path, const Vector& eta) {
  auto out = open_out(path);
  write_weights(out, eta);
}

Vector average_score_files(const std::vector<std::string>& paths) {
  if (paths.empty()) throw InvalidInput("no score files given");
  Vector sum = read_scores_file(paths.front());
  for (std::size_t k = 1; k < paths.size(); ++k) {
    const Vector next = read_scores_file(paths[k]);
    if (next.size() != sum.size()) throw InvalidInput("score files have different lengths");
    sum += next;
  }
  return sum / static_cast<double>(paths.size());
}

}  // namespace lupi
