#include "lupi/serialize.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace lupi {

namespace {

struct Row {
  long index;
  double coef;
  std::vector<double> x;
};

void write_rows(std::ostream& out, const char* tag, const Vector& coef, const Matrix& x) {
  for (Eigen::Index i = 0; i < coef.size(); ++i) {
    if (coef[i] == 0.0) continue;
    out << tag << ' ' << i << ' ' << format_double(coef[i]);
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << ' ' << format_double(x(i, j));
    out << '\n';
  }
}

struct Record {
  std::map<std::string, std::string> fields;
  std::map<std::string, std::vector<Row>> rows;
  std::vector<double> w_tilde;
  bool has_w_tilde = false;

  const std::string& get(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw InvalidInput("model record is missing '" + key + "'");
    return it->second;
  }
  double num(const std::string& key) const { return parse_double(get(key)); }
};

Record read_record(std::istream& in, const std::string& expected_type) {
  Record rec;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "end") break;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      rec.fields[line.substr(0, eq)] = line.substr(eq + 1);
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "w_tilde") {
      std::string tok;
      while (ls >> tok) rec.w_tilde.push_back(parse_double(tok));
      rec.has_w_tilde = true;
      continue;
    }
    Row row;
    std::string tok;
    if (!(ls >> row.index >> tok)) throw InvalidInput("malformed model row: " + line);
    row.coef = parse_double(tok);
    while (ls >> tok) row.x.push_back(parse_double(tok));
    rec.rows[tag].push_back(std::move(row));
  }
  if (rec.get("model") != expected_type) throw InvalidInput("model record has type '" + rec.get("model") + "'");
  return rec;
}

Matrix rows_matrix(const std::vector<Row>& rows, Eigen::Index dim) {
  Matrix x(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].x.size()) != dim) throw InvalidInput("model row has the wrong dimension");
    for (Eigen::Index j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(r), j) = rows[r].x[j];
  }
  return x;
}

const std::vector<Row>& rows_of(const Record& rec, const std::string& tag) {
  static const std::vector<Row> empty;
  auto it = rec.rows.find(tag);
  return it == rec.rows.end() ? empty : it->second;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_significant(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text.empty()) throw InvalidInput("empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw InvalidInput("not a number: '" + text + "'");
  return v;
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("expected key=value, got: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_model(std::ostream& out, const WsvmModel& m) {
  out << "model=wsvm\n";
  out << "kernel=" << m.kernel.to_string() << '\n';
  out << "dim=" << m.train_x.cols() << '\n';
  out << "b=" << format_double(m.b) << '\n';
  out << "b_lo=" << format_double(m.b_interval.lo) << '\n';
  out << "b_hi=" << format_double(m.b_interval.hi) << '\n';
  const Vector coef = m.coefficients();
  out << "support=" << (coef.array() != 0.0).count() << '\n';
  write_rows(out, "sv", coef, m.train_x);
  out << "end\n";
}

void write_model(std::ostream& out, const SvmPlusModel& m) {
  out << "model=svmplus\n";
  out << "kernel=" << m.kernel.to_string() << '\n';
  out << "priv_kernel=" << m.priv_kernel.to_string() << '\n';
  out << "dim=" << m.train_x.cols() << '\n';
  out << "priv_dim=" << m.priv_x.cols() << '\n';
  out << "C=" << format_double(m.C) << '\n';
  out << "gamma=" << format_double(m.gamma) << '\n';
  out << "b=" << format_double(m.b) << '\n';
  out << "b_lo=" << format_double(m.b_interval.lo) << '\n';
  out << "b_hi=" << format_double(m.b_interval.hi) << '\n';
  out << "b_tilde=" << format_double(m.b_tilde) << '\n';
  out << "path=" << to_string(m.path) << '\n';
  const Vector coef = m.coefficients();
  out << "support=" << (coef.array() != 0.0).count() << '\n';
  write_rows(out, "sv", coef, m.train_x);
  if (m.gamma > 0.0) write_rows(out, "cv", m.alpha_tilde, m.priv_x);
  if (m.w_tilde) {
    out << "w_tilde";
    for (Eigen::Index j = 0; j < m.w_tilde->size(); ++j) out << ' ' << format_double((*m.w_tilde)[j]);
    out << '\n';
  }
  out << "end\n";
}

WsvmModel read_wsvm_model(std::istream& in) {
  const Record rec = read_record(in, "wsvm");
  WsvmModel m;
  m.kernel = KernelSpec::parse(rec.get("kernel"));
  m.b = rec.num("b");
  m.b_interval = {rec.num("b_lo"), rec.num("b_hi")};
  const auto& sv = rows_of(rec, "sv");
  const Eigen::Index dim = std::stol(rec.get("dim"));
  m.train_x = rows_matrix(sv, dim);
  const auto k = static_cast<Eigen::Index>(sv.size());
  m.y.resize(k);
  m.alpha.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    m.y[r] = sv[r].coef >= 0.0 ? 1.0 : -1.0;
    m.alpha[r] = std::abs(sv[r].coef);
  }
  return m;
}

SvmPlusModel read_svmplus_model(std::istream& in) {
  const Record rec = read_record(in, "svmplus");
  SvmPlusModel m;
  m.kernel = KernelSpec::parse(rec.get("kernel"));
  m.priv_kernel = KernelSpec::parse(rec.get("priv_kernel"));
  m.C = rec.num("C");
  m.gamma = rec.num("gamma");
  m.b = rec.num("b");
  m.b_interval = {rec.num("b_lo"), rec.num("b_hi")};
  m.b_tilde = rec.num("b_tilde");
  const auto& sv = rows_of(rec, "sv");
  m.train_x = rows_matrix(sv, std::stol(rec.get("dim")));
  const auto k = static_cast<Eigen::Index>(sv.size());
  m.y.resize(k);
  m.alpha.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    m.y[r] = sv[r].coef >= 0.0 ? 1.0 : -1.0;
    m.alpha[r] = std::abs(sv[r].coef);
  }
  const auto& cv = rows_of(rec, "cv");
  m.priv_x = rows_matrix(cv, std::stol(rec.get("priv_dim")));
  m.alpha_tilde.resize(static_cast<Eigen::Index>(cv.size()));
  for (std::size_t r = 0; r < cv.size(); ++r) m.alpha_tilde[static_cast<Eigen::Index>(r)] = cv[r].coef;
  if (rec.has_w_tilde) m.w_tilde = Eigen::Map<const Vector>(rec.w_tilde.data(), static_cast<Eigen::Index>(rec.w_tilde.size()));
  const std::string path = rec.get("path");
  m.path = path == "smo" ? SvmPlusPath::smo
           : path == "reduced-full-rank" ? SvmPlusPath::reduced_full_rank
                                         : SvmPlusPath::reduced_constrained;
  return m;
}

}  // namespace lupi
