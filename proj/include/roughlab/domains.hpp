#ifndef ROUGHLAB_DOMAINS_HPP
#define ROUGHLAB_DOMAINS_HPP

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "roughlab/lift.hpp"

namespace roughlab {

// Membership predicates for the domains of interest. All inequalities are
// strict; boundary points are excluded. Every predicate is a pure function
// of the lift of w and the relevant cross integrals.

/// U_{a,z}: ||lift(w)||_{C^p} < a, ||C_{w,z}||_{p/2} < a, ||C_{z,w}||_{p/2} < a.
inline bool in_U(const DiscretePath& w, const DiscretePath& z, double a, double p) {
  if (w.level() != z.level()) {
    throw std::invalid_argument("in_U: paths live on different levels");
  }
  return cp_norm(lift(w), p) < a && cross_norm(cross(w, z), p) < a &&
         cross_norm(cross(z, w), p) < a;
}

/// B_{a,h}: all of ||(w-h)_2||_{p/2}, ||C_{w-h,h}||_{p/2}, ||C_{h,w-h}||_{p/2}
/// and ||w-h||_p below a.
inline bool in_B(const DiscretePath& w, const DiscretePath& h, double a, double p) {
  require_same_shape(w, h, "in_B");
  const DiscretePath diff = w - h;
  return level2_norm(lift(diff), p) < a && cross_norm(cross(diff, h), p) < a &&
         cross_norm(cross(h, diff), p) < a && level1_norm(diff, p) < a;
}

/// O_a(h): rough-path distance between the lifts below a.
inline bool in_O(const DiscretePath& w, const DiscretePath& h, double a, double p) {
  require_same_shape(w, h, "in_O");
  return rough_distance(lift(w), lift(h), p) < a;
}

/// U_{a,b} for one-dimensional pairs: ||w1||_p ||w2||_p < a and both
/// level-1 norms below b. Requires a < b^2.
inline bool in_Uab(const DiscretePath& w1, const DiscretePath& w2, double a,
                   double b, double p) {
  if (w1.dimension() != 1 || w2.dimension() != 1) {
    throw std::invalid_argument("in_Uab: paths must be one-dimensional");
  }
  if (w1.level() != w2.level()) {
    throw std::invalid_argument("in_Uab: paths live on different levels");
  }
  if (!(a > 0.0 && a < b * b)) {
    throw std::invalid_argument("in_Uab: requires 0 < a < b^2");
  }
  const double n1 = level1_norm(w1, p);
  const double n2 = level1_norm(w2, p);
  return n1 * n2 < a && n1 < b && n2 < b;
}

/// Section set of the last coordinate against the concatenated reference
/// (w_prefix, z), in that order: ||C_{(w',z),w_last}||_{p/2} < a,
/// ||C_{w_last,(w',z)}||_{p/2} < a, ||w_last||_p < a.
inline bool in_section(const DiscretePath& w_last, const DiscretePath& w_prefix,
                       const DiscretePath& z, double a, double p) {
  if (w_last.dimension() != 1) {
    throw std::invalid_argument("in_section: last coordinate must be one-dimensional");
  }
  const DiscretePath ref = concat_dims(w_prefix, z);
  if (ref.level() != w_last.level()) {
    throw std::invalid_argument("in_section: paths live on different levels");
  }
  return cross_norm(cross(ref, w_last), p) < a &&
         cross_norm(cross(w_last, ref), p) < a && level1_norm(w_last, p) < a;
}

/// Degenerate prefix (d = 0): the section reduces to the z-only constraints.
inline bool in_section(const DiscretePath& w_last, const DiscretePath& z,
                       double a, double p) {
  if (w_last.dimension() != 1) {
    throw std::invalid_argument("in_section: last coordinate must be one-dimensional");
  }
  if (z.level() != w_last.level()) {
    throw std::invalid_argument("in_section: paths live on different levels");
  }
  return cross_norm(cross(z, w_last), p) < a &&
         cross_norm(cross(w_last, z), p) < a && level1_norm(w_last, p) < a;
}

enum class DomainKind { U, B, O, Uab, Section };

inline const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::U: return "U";
    case DomainKind::B: return "B";
    case DomainKind::O: return "O";
    case DomainKind::Uab: return "Uab";
    case DomainKind::Section: return "Section";
  }
  return "?";
}

inline DomainKind domain_kind_from(const std::string& s) {
  if (s == "U") return DomainKind::U;
  if (s == "B") return DomainKind::B;
  if (s == "O") return DomainKind::O;
  if (s == "Uab") return DomainKind::Uab;
  if (s == "Section") return DomainKind::Section;
  throw std::invalid_argument("unknown domain kind '" + s + "' (want U|B|O|Uab|Section)");
}

/// Parametrized membership test. `reference` is z for U, h for B and O, z for
/// Section; `prefix` is the section's w' when present. Uab needs no reference.
/// A missing reference stands for the zero path of the sample's own shape.
struct DomainSpec {
  DomainKind kind = DomainKind::U;
  double a = 0.0;
  double b = 0.0;  // Uab only
  VarParams params;
  std::optional<DiscretePath> reference;
  std::optional<DiscretePath> prefix;

  DomainSpec(DomainKind kind_, double a_, VarParams params_,
             std::optional<DiscretePath> reference_ = std::nullopt,
             double b_ = 0.0, std::optional<DiscretePath> prefix_ = std::nullopt)
      : kind(kind_), a(a_), b(b_), params(params_),
        reference(std::move(reference_)), prefix(std::move(prefix_)) {
    if (!(a > 0.0)) throw std::invalid_argument("DomainSpec: requires a > 0");
    if (kind == DomainKind::Uab && !(a < b * b)) {
      throw std::invalid_argument("DomainSpec: Uab requires a < b^2");
    }
  }
};

inline bool contains(const DomainSpec& spec, const DiscretePath& w) {
  const DiscretePath& ref = spec.reference ? *spec.reference
                                           : DiscretePath(w.dimension(), w.level());
  switch (spec.kind) {
    case DomainKind::U: return in_U(w, ref, spec.a, spec.params.p);
    case DomainKind::B: return in_B(w, ref, spec.a, spec.params.p);
    case DomainKind::O: return in_O(w, ref, spec.a, spec.params.p);
    case DomainKind::Section:
      return spec.prefix ? in_section(w, *spec.prefix, ref, spec.a, spec.params.p)
                         : in_section(w, ref, spec.a, spec.params.p);
    case DomainKind::Uab:
      throw std::invalid_argument("contains: Uab takes two paths");
  }
  return false;
}

inline bool contains(const DomainSpec& spec, const DiscretePath& w1,
                     const DiscretePath& w2) {
  if (spec.kind != DomainKind::Uab) {
    throw std::invalid_argument("contains: two-path form is for Uab only");
  }
  return in_Uab(w1, w2, spec.a, spec.b, spec.params.p);
}

/// Flat key-value block, one `key = value` per line. Path-valued fields
/// reference CSV files; "zero" leaves the reference implicit.
inline std::string serialize(const DomainSpec& spec, const std::string& reference_file,
                             const std::string& prefix_file = "") {
  std::ostringstream os;
  os << "kind = " << to_string(spec.kind) << "\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", spec.a);
  os << "a = " << buf << "\n";
  if (spec.kind == DomainKind::Uab) {
    std::snprintf(buf, sizeof(buf), "%.17g", spec.b);
    os << "b = " << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "%.17g", spec.params.p);
  os << "p = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", spec.params.kappa);
  os << "kappa = " << buf << "\n";
  os << "reference = " << (spec.reference ? reference_file : "zero") << "\n";
  if (spec.prefix) os << "prefix = " << prefix_file << "\n";
  return os.str();
}

inline DomainSpec parse_domain_spec(std::istream& is) {
  std::string kind_s, reference_s, prefix_s;
  double a = 0.0, b = 0.0, p = 2.5, kappa = 2.0;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "kind") kind_s = value;
    else if (key == "a") a = std::stod(value);
    else if (key == "b") b = std::stod(value);
    else if (key == "p") p = std::stod(value);
    else if (key == "kappa") kappa = std::stod(value);
    else if (key == "reference") reference_s = value;
    else if (key == "prefix") prefix_s = value;
    else throw std::invalid_argument("domain spec: unknown key '" + key + "'");
  }
  if (kind_s.empty()) throw std::invalid_argument("domain spec: missing 'kind'");
  std::optional<DiscretePath> reference;
  if (!reference_s.empty() && reference_s != "zero") reference = read_csv(reference_s);
  std::optional<DiscretePath> prefix;
  if (!prefix_s.empty()) prefix = read_csv(prefix_s);
  return DomainSpec(domain_kind_from(kind_s), a, VarParams(p, kappa),
                    std::move(reference), b, std::move(prefix));
}

}  // namespace roughlab

#endif  // ROUGHLAB_DOMAINS_HPP
