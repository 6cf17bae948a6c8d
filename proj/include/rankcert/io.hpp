#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rankcert/design.hpp"
#include "rankcert/errors.hpp"
#include "rankcert/generators.hpp"
#include "rankcert/geometry.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/rational.hpp"
#include "rankcert/scaling.hpp"

namespace rankcert {

using nlohmann::json;

inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a_hex(const std::string& data) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a(data)));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("short write to '" + path + "'");
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string entry_token(const ComplexMatrix& M, int i, int j) {
  if (M.exact) {
    const GaussianRational& z = M.xat(i, j);
    if (z.im == 0) return rat_str(z.re);
    return rat_str(z.re) + "," + rat_str(z.im);
  }
  const Complex& z = M.at(i, j);
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + "," + format_double(z.imag());
}

struct EntryParts {
  std::string re, im;
  bool has_im = false;
};

inline EntryParts split_entry(const std::string& tok) {
  auto pos = tok.find(',');
  if (pos == std::string::npos) return {tok, "", false};
  if (tok.find(',', pos + 1) != std::string::npos)
    throw BadFormat("entry '" + tok + "' has more than one comma");
  if (pos == 0 || pos + 1 == tok.size())
    throw BadFormat("entry '" + tok + "' is missing a component");
  return {tok.substr(0, pos), tok.substr(pos + 1), true};
}

inline double parse_double_token(const std::string& s) {
  if (looks_like_rational(s)) return to_double(parse_rational(s));
  if (s.empty()) throw BadFormat("empty numeric token");
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw BadFormat("bad numeric token: '" + s + "'");
  return v;
}

// A file is exact iff every scalar component is an integer or fraction.
inline bool all_rational(const std::vector<EntryParts>& entries) {
  for (const auto& e : entries) {
    if (!looks_like_rational(e.re)) return false;
    if (e.has_im && !looks_like_rational(e.im)) return false;
  }
  return true;
}

inline ComplexMatrix matrix_from_entries(int m, int n,
                                         const std::vector<EntryParts>& entries) {
  ComplexMatrix M(m, n, all_rational(entries));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const EntryParts& e = entries[static_cast<std::size_t>(i) * n + j];
      if (M.exact)
        M.set_exact(i, j, GaussianRational(parse_rational(e.re),
                                           e.has_im ? parse_rational(e.im) : Rational(0)));
      else
        M.at(i, j) = Complex(parse_double_token(e.re),
                             e.has_im ? parse_double_token(e.im) : 0.0);
    }
  return M;
}

}  // namespace detail

// Text format: a "m n" header line, then m*n whitespace-separated entries in
// row-major order. An entry is `re` or `re,im`; components are decimal
// floats or exact fractions `p/q`. The matrix reads back exact iff every
// component is an integer or fraction.
inline std::string matrix_to_text(const ComplexMatrix& M) {
  std::ostringstream out;
  out << M.m << ' ' << M.n << '\n';
  for (int i = 0; i < M.m; ++i) {
    for (int j = 0; j < M.n; ++j) out << (j ? " " : "") << detail::entry_token(M, i, j);
    out << '\n';
  }
  return out.str();
}

inline ComplexMatrix matrix_from_text(const std::string& content) {
  std::istringstream in(content);
  long long m = 0, n = 0;
  if (!(in >> m >> n)) throw BadFormat("matrix header must be 'm n'");
  if (m < 1 || n < 1 || m > 1'000'000 || n > 1'000'000 || m * n > 100'000'000)
    throw BadFormat("unreasonable matrix dimensions in header");
  std::vector<detail::EntryParts> entries;
  entries.reserve(static_cast<std::size_t>(m * n));
  std::string tok;
  while (in >> tok) entries.push_back(detail::split_entry(tok));
  if (static_cast<long long>(entries.size()) != m * n)
    throw BadFormat("expected " + std::to_string(m * n) + " entries, found " +
                    std::to_string(entries.size()));
  return detail::matrix_from_entries(static_cast<int>(m), static_cast<int>(n), entries);
}

// JSON format: {"m":..,"n":..,"entries":[..]} with row-major entries, each a
// number (real), an [re,im] pair of numbers, or an exact string "p/q" /
// "p/q,r/s". All-string files read back exact.
inline std::string matrix_to_json_text(const ComplexMatrix& M) {
  json j;
  j["m"] = M.m;
  j["n"] = M.n;
  json entries = json::array();
  for (int i = 0; i < M.m; ++i)
    for (int jj = 0; jj < M.n; ++jj) {
      if (M.exact)
        entries.push_back(detail::entry_token(M, i, jj));
      else
        entries.push_back(json::array({M.at(i, jj).real(), M.at(i, jj).imag()}));
    }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

inline ComplexMatrix matrix_from_json_text(const std::string& content) {
  json j;
  try {
    j = json::parse(content);
  } catch (const json::exception& e) {
    throw BadFormat(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("entries"))
    throw BadFormat("matrix JSON needs fields m, n, entries");
  if (!j["m"].is_number_integer() || !j["n"].is_number_integer() || !j["entries"].is_array())
    throw BadFormat("matrix JSON fields have wrong types");
  const long long m = j["m"].get<long long>(), n = j["n"].get<long long>();
  if (m < 1 || n < 1 || m * n > 100'000'000) throw BadFormat("unreasonable dimensions");
  const auto& arr = j["entries"];
  if (static_cast<long long>(arr.size()) != m * n)
    throw BadFormat("expected " + std::to_string(m * n) + " entries, found " +
                    std::to_string(arr.size()));
  std::vector<detail::EntryParts> entries;
  entries.reserve(arr.size());
  for (const auto& e : arr) {
    if (e.is_string()) {
      entries.push_back(detail::split_entry(e.get<std::string>()));
    } else if (e.is_number()) {
      entries.push_back({detail::format_double(e.get<double>()), "", false});
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      entries.push_back({detail::format_double(e[0].get<double>()),
                         detail::format_double(e[1].get<double>()), true});
    } else {
      throw BadFormat("entry must be a number, an [re,im] pair, or an exact string");
    }
  }
  return detail::matrix_from_entries(static_cast<int>(m), static_cast<int>(n), entries);
}

inline ComplexMatrix matrix_from_content(const std::string& content) {
  for (char c : content) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{' ? matrix_from_json_text(content) : matrix_from_text(content);
  }
  throw BadFormat("empty matrix file");
}

inline ComplexMatrix read_matrix_file(const std::string& path) {
  return matrix_from_content(read_file(path));
}

inline bool has_json_extension(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

// Writes JSON when the path ends in .json, text otherwise.
inline void write_matrix_file(const ComplexMatrix& M, const std::string& path) {
  write_file(path, has_json_extension(path) ? matrix_to_json_text(M) : matrix_to_text(M));
}

// Point files are text only: "n d" header, then n rows of d entries with the
// same token syntax as matrices.
inline std::string points_to_text(const PointConfiguration& C) {
  std::ostringstream out;
  out << C.n << ' ' << C.d << '\n';
  for (int i = 0; i < C.n; ++i) {
    for (int j = 0; j < C.d; ++j) {
      if (j) out << ' ';
      if (C.exact) {
        const GaussianRational& z = C.xat(i, j);
        out << (z.im == 0 ? rat_str(z.re) : rat_str(z.re) + "," + rat_str(z.im));
      } else {
        const Complex& z = C.at(i, j);
        out << (z.imag() == 0.0
                    ? detail::format_double(z.real())
                    : detail::format_double(z.real()) + "," + detail::format_double(z.imag()));
      }
    }
    out << '\n';
  }
  return out.str();
}

inline PointConfiguration points_from_text(const std::string& content) {
  std::istringstream in(content);
  long long n = 0, d = 0;
  if (!(in >> n >> d)) throw BadFormat("point header must be 'n d'");
  if (n < 1 || d < 1 || n * d > 10'000'000) throw BadFormat("unreasonable point dimensions");
  std::vector<detail::EntryParts> entries;
  std::string tok;
  while (in >> tok) entries.push_back(detail::split_entry(tok));
  if (static_cast<long long>(entries.size()) != n * d)
    throw BadFormat("expected " + std::to_string(n * d) + " coordinates, found " +
                    std::to_string(entries.size()));
  PointConfiguration C(static_cast<int>(n), static_cast<int>(d),
                       detail::all_rational(entries));
  for (int i = 0; i < C.n; ++i)
    for (int j = 0; j < C.d; ++j) {
      const auto& e = entries[static_cast<std::size_t>(i) * C.d + j];
      if (C.exact)
        C.set_exact(i, j, GaussianRational(parse_rational(e.re),
                                           e.has_im ? parse_rational(e.im) : Rational(0)));
      else
        C.at(i, j) = Complex(detail::parse_double_token(e.re),
                             e.has_im ? detail::parse_double_token(e.im) : 0.0);
    }
  return C;
}

inline PointConfiguration read_points_file(const std::string& path) {
  return points_from_text(read_file(path));
}

inline void write_points_file(const PointConfiguration& C, const std::string& path) {
  write_file(path, points_to_text(C));
}

// ---- report serialization ----------------------------------------------

inline json json_of(const Rational& r) { return rat_str(r); }

inline json json_of(const DesignParams& d) {
  return {{"q", d.q}, {"k", d.k}, {"t", d.t},
          {"m", d.m}, {"n", d.n}, {"uniform_q", d.uniform_q}};
}

inline json json_of(const ScalingResult& s) {
  json j{{"rho", s.rho},
         {"gamma", s.gamma},
         {"max_row_sq_norm", s.max_row_sq_norm},
         {"min_col_sq_norm", s.min_col_sq_norm},
         {"iterations", s.iterations},
         {"converged", s.converged}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

inline json json_of(const RankBoundReport& r) {
  json j{{"params", json_of(r.params)},
         {"bound_main", json_of(r.bound_main)},
         {"bound_main_linear", json_of(r.bound_main_linear)},
         {"bound_cor_no_m", json_of(r.bound_cor_no_m)},
         {"bound_avgq", r.bound_avgq ? json_of(*r.bound_avgq) : json()},
         {"bound_square", r.bound_square ? json_of(*r.bound_square) : json()},
         {"bound_unified", json_of(r.bound_unified)},
         {"certified", r.certified},
         {"actual_rank", r.actual_rank ? json(*r.actual_rank) : json()},
         {"notes", r.notes}};
  return j;
}

inline json json_of(const CoverMatrix& c) {
  return {{"rows", c.B.m},
          {"cols", c.B.n},
          {"multiplicity", c.multiplicity},
          {"c_target", c.c_target},
          {"origin", c.origin}};
}

inline json json_of(const SGReport& r) {
  return {{"n", r.n},
          {"m_rows", r.m_rows},
          {"delta", json_of(r.delta)},
          {"bound", json_of(r.bound)},
          {"certified_rank", r.certified_rank},
          {"rank_measured", r.rank_measured},
          {"affine_dimension", r.affine_dimension},
          {"dim_bound", json_of(r.dim_bound)},
          {"kelly_route", r.kelly_route},
          {"pass", r.pass},
          {"notes", r.notes}};
}

inline json json_of(const ExtractReport& r) {
  return {{"survivors", r.survivors},
          {"measured_delta", json_of(r.measured_delta)},
          {"affine_dimension", r.affine_dimension},
          {"dim_bound", json_of(r.dim_bound)},
          {"hypothesis_met", r.hypothesis_met},
          {"size_ok", r.size_ok},
          {"dim_ok", r.dim_ok},
          {"empty", r.empty},
          {"notes", r.notes}};
}

inline json json_of(const FlatReport& r) {
  return {{"k", r.k},
          {"variant", r.variant == FlatVariant::star ? "star" : "plain"},
          {"delta", json_of(r.delta)},
          {"affine_dimension", r.affine_dimension},
          {"k_over_delta", r.k_over_delta ? json_of(*r.k_over_delta) : json()},
          {"asserted", r.asserted},
          {"pass", r.pass},
          {"notes", r.notes}};
}

inline json json_of(const FreimanReport& r) {
  return {{"set_size", r.set_size},
          {"image_size", r.image_size},
          {"K", json_of(r.K)},
          {"dim_linear", r.dim_linear},
          {"dim_affine", r.dim_affine},
          {"K_squared", json_of(r.K_squared)},
          {"notes", r.notes}};
}

inline json json_of(const RandomDesignResult& r) {
  return {{"feasible", r.feasible},
          {"attempts", r.attempts},
          {"reached", json_of(r.reached)}};
}

}  // namespace rankcert
