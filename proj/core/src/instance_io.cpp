#include "decot/instance_io.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "decot/errors.hpp"

namespace decot {

namespace {

constexpr const char* kMagic = "decot-instance";
constexpr int kVersion = 1;

void write_vector(std::ostream& out, const char* key, const Vector& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
  out << '\n';
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_header(std::ostream& out, const char* kind, int n, int num_costs) {
  out << std::setprecision(17);
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << kind << '\n';
  out << "n " << n << '\n';
  out << "N " << num_costs << '\n';
}

// Whitespace tokenizer that tracks the last token for error messages.
class Tokens {
 public:
  explicit Tokens(std::istream& in) : in_(in) {}

  std::string word() {
    std::string s;
    if (!(in_ >> s)) throw ParseError("instance: unexpected end of input");
    return s;
  }
  void expect(const std::string& key) {
    const std::string got = word();
    if (got != key) {
      throw ParseError("instance: expected '" + key + "', found '" + got + "'");
    }
  }
  int integer() {
    const std::string s = word();
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw ParseError("instance: bad integer '" + s + "'");
    return v;
  }
  double real() {
    const std::string s = word();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
      throw ParseError("instance: bad number '" + s + "'");
    }
    return v;
  }

 private:
  std::istream& in_;
};

Vector read_vector(Tokens& tok, const char* key, int n) {
  tok.expect(key);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = tok.real();
  return v;
}

Matrix read_matrix(Tokens& tok, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = tok.real();
  }
  return m;
}

}  // namespace

void write_instance(std::ostream& out, const OTInstance& inst) {
  const auto old_precision = out.precision();
  write_header(out, "dot", inst.n, 1);
  write_vector(out, "p", inst.p);
  write_vector(out, "q", inst.q);
  out << "cost 1\n";
  write_matrix(out, inst.cost);
  out.precision(old_precision);
}

void write_instance(std::ostream& out, const EOTInstance& inst) {
  const auto old_precision = out.precision();
  write_header(out, "deot", inst.n, inst.num_agents);
  write_vector(out, "p", inst.p);
  write_vector(out, "q", inst.q);
  for (int k = 0; k < inst.num_agents; ++k) {
    out << "cost " << k + 1 << '\n';
    write_matrix(out, inst.costs[static_cast<std::size_t>(k)]);
  }
  out.precision(old_precision);
}

Instance read_instance(std::istream& in) {
  Tokens tok(in);
  tok.expect(kMagic);
  if (const int version = tok.integer(); version != kVersion) {
    throw ParseError("instance: unsupported version " + std::to_string(version));
  }
  tok.expect("kind");
  const std::string kind = tok.word();
  tok.expect("n");
  const int n = tok.integer();
  tok.expect("N");
  const int num_costs = tok.integer();
  if (n < 1 || num_costs < 1) throw ParseError("instance: n and N must be positive");
  Vector p = read_vector(tok, "p", n);
  Vector q = read_vector(tok, "q", n);
  std::vector<Matrix> costs;
  for (int k = 0; k < num_costs; ++k) {
    tok.expect("cost");
    if (tok.integer() != k + 1) throw ParseError("instance: cost blocks out of order");
    costs.push_back(read_matrix(tok, n));
  }
  if (kind == "dot") {
    if (num_costs != 1) throw ParseError("instance: dot instances carry one cost");
    OTInstance inst{n, std::move(costs.front()), std::move(p), std::move(q)};
    inst.validate();
    return inst;
  }
  if (kind == "deot") {
    EOTInstance inst{n, num_costs, std::move(costs), std::move(p), std::move(q)};
    inst.validate();
    return inst;
  }
  throw ParseError("instance: unknown kind '" + kind + "'");
}

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  std::visit([&](const auto& i) { write_instance(out, i); }, inst);
  if (!out) throw ParseError("failed writing '" + path + "'");
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_instance(in);
}

}  // namespace decot
