#include "trigrid/sdf/analytic.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace trigrid {

std::string format_point(const Vec3& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x.x() << ", " << x.y() << ", " << x.z() << ")";
  return os.str();
}

Vec3 unit_normal(const ImplicitField& field, const Vec3& x, double min_gradient) {
  const Vec3 g = field.gradient(x);
  const double n = g.norm();
  if (!(n > min_gradient)) {
    throw GeometryError("vanishing gradient at " + format_point(x));
  }
  return g / n;
}

enum class NodeKind { Sphere, Box, Cylinder, HalfSpace, Union, Intersection, Difference };

struct AnalyticSdf::Node {
  NodeKind kind;
  Vec3 a = Vec3::Zero();  // center / lo / normal
  Vec3 b = Vec3::Zero();  // hi / axis
  double r = 0.0;         // radius / offset
  double len = 0.0;       // cylinder half length
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;

  double eval(const Vec3& x, Vec3* grad) const;
  Box3 bounds() const;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_eval(const Vec3& c, double radius, const Vec3& x, Vec3* grad) {
  const Vec3 d = x - c;
  const double dist = d.norm();
  if (grad) {
    *grad = dist > 0.0 ? Vec3(-d / dist) : Vec3::Zero();
  }
  return radius - dist;
}

// Signed distance of an axis-aligned box, positive inside.
double box_eval(const Vec3& lo, const Vec3& hi, const Vec3& x, Vec3* grad) {
  const Vec3 c = 0.5 * (lo + hi);
  const Vec3 half = 0.5 * (hi - lo);
  const Vec3 rel = x - c;
  const Vec3 q = rel.cwiseAbs() - half;
  const Vec3 qpos = q.cwiseMax(0.0);
  const double outside = qpos.norm();
  if (outside > 0.0) {
    if (grad) {
      Vec3 g;
      for (int k = 0; k < 3; ++k) {
        g[k] = -(qpos[k] / outside) * (rel[k] >= 0.0 ? 1.0 : -1.0);
      }
      *grad = g;
    }
    return -outside;
  }
  int k = 0;
  if (q[1] > q[k]) k = 1;
  if (q[2] > q[k]) k = 2;
  if (grad) {
    Vec3 g = Vec3::Zero();
    g[k] = rel[k] >= 0.0 ? -1.0 : 1.0;
    *grad = g;
  }
  return -q[k];
}

double cylinder_eval(const Vec3& center, const Vec3& axis, double radius, double half_length,
                     const Vec3& x, Vec3* grad) {
  const Vec3 rel = x - center;
  const double along = rel.dot(axis);
  const Vec3 radial = rel - along * axis;
  const double rho = radial.norm();
  const double q0 = rho - radius;
  const double q1 = std::abs(along) - half_length;
  const Vec3 radial_dir = rho > 0.0 ? Vec3(radial / rho) : Vec3::Zero();
  const Vec3 axial_dir = along >= 0.0 ? axis : Vec3(-axis);
  if (q0 > 0.0 || q1 > 0.0) {
    const double p0 = std::max(q0, 0.0);
    const double p1 = std::max(q1, 0.0);
    const double outside = std::hypot(p0, p1);
    if (grad) *grad = -(p0 * radial_dir + p1 * axial_dir) / outside;
    return -outside;
  }
  if (q0 >= q1) {
    if (grad) *grad = -radial_dir;
    return -q0;
  }
  if (grad) *grad = -axial_dir;
  return -q1;
}

}  // namespace

double AnalyticSdf::Node::eval(const Vec3& x, Vec3* grad) const {
  switch (kind) {
    case NodeKind::Sphere:
      return sphere_eval(a, r, x, grad);
    case NodeKind::Box:
      return box_eval(a, b, x, grad);
    case NodeKind::Cylinder:
      return cylinder_eval(a, b, r, len, x, grad);
    case NodeKind::HalfSpace:
      if (grad) *grad = -a;
      return r - a.dot(x);
    case NodeKind::Union:
    case NodeKind::Intersection:
    case NodeKind::Difference: {
      Vec3 gl, gr;
      const double vl = left->eval(x, grad ? &gl : nullptr);
      double vr = right->eval(x, grad ? &gr : nullptr);
      if (kind == NodeKind::Difference) {
        vr = -vr;
        gr = -gr;
      }
      const bool take_left = kind == NodeKind::Union ? vl >= vr : vl <= vr;
      if (grad) *grad = take_left ? gl : gr;
      return take_left ? vl : vr;
    }
  }
  return 0.0;
}

Box3 AnalyticSdf::Node::bounds() const {
  switch (kind) {
    case NodeKind::Sphere:
      return {a - Vec3::Constant(r), a + Vec3::Constant(r)};
    case NodeKind::Box:
      return {a, b};
    case NodeKind::Cylinder: {
      const Vec3 reach = (len * b).cwiseAbs() + Vec3::Constant(r);
      return {a - reach, a + reach};
    }
    case NodeKind::HalfSpace:
      return {Vec3::Constant(-kInf), Vec3::Constant(kInf)};
    case NodeKind::Union: {
      const Box3 l = left->bounds();
      const Box3 rr = right->bounds();
      return {l.lo.cwiseMin(rr.lo), l.hi.cwiseMax(rr.hi)};
    }
    case NodeKind::Intersection: {
      const Box3 l = left->bounds();
      const Box3 rr = right->bounds();
      return {l.lo.cwiseMax(rr.lo), l.hi.cwiseMin(rr.hi)};
    }
    case NodeKind::Difference:
      return left->bounds();
  }
  return {};
}

AnalyticSdf::AnalyticSdf(std::shared_ptr<const Node> root, std::string description)
    : root_(std::move(root)), description_(std::move(description)) {}

AnalyticSdf AnalyticSdf::sphere(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("sphere radius must be positive");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sphere;
  n->a = center;
  n->r = radius;
  return {n, "sphere"};
}

AnalyticSdf AnalyticSdf::box(const Vec3& lo, const Vec3& hi) {
  if (!((hi.array() > lo.array()).all())) throw GeometryError("box requires lo < hi");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Box;
  n->a = lo;
  n->b = hi;
  return {n, "box"};
}

AnalyticSdf AnalyticSdf::cylinder(const Vec3& center, const Vec3& axis, double radius,
                                  double half_length) {
  if (!(radius > 0.0) || !(half_length > 0.0) || !(axis.norm() > 0.0)) {
    throw GeometryError("cylinder requires positive radius, length and a nonzero axis");
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Cylinder;
  n->a = center;
  n->b = axis.normalized();
  n->r = radius;
  n->len = half_length;
  return {n, "cylinder"};
}

AnalyticSdf AnalyticSdf::half_space(const Vec3& normal, double offset) {
  const double len = normal.norm();
  if (!(len > 0.0)) throw GeometryError("half-space normal must be nonzero");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::HalfSpace;
  n->a = normal / len;
  n->r = offset / len;
  return {n, "halfspace"};
}

namespace {
std::shared_ptr<AnalyticSdf::Node> combine(NodeKind kind,
                                           std::shared_ptr<const AnalyticSdf::Node> l,
                                           std::shared_ptr<const AnalyticSdf::Node> r) {
  auto n = std::make_shared<AnalyticSdf::Node>();
  n->kind = kind;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}
}  // namespace

AnalyticSdf AnalyticSdf::csg_union(const AnalyticSdf& a, const AnalyticSdf& b) {
  return {combine(NodeKind::Union, a.root_, b.root_),
          "union(" + a.description_ + "," + b.description_ + ")"};
}

AnalyticSdf AnalyticSdf::csg_intersection(const AnalyticSdf& a, const AnalyticSdf& b) {
  return {combine(NodeKind::Intersection, a.root_, b.root_),
          "intersection(" + a.description_ + "," + b.description_ + ")"};
}

AnalyticSdf AnalyticSdf::csg_difference(const AnalyticSdf& a, const AnalyticSdf& b) {
  return {combine(NodeKind::Difference, a.root_, b.root_),
          "difference(" + a.description_ + "," + b.description_ + ")"};
}

double AnalyticSdf::value(const Vec3& x) const { return root_->eval(x, nullptr); }

Vec3 AnalyticSdf::gradient(const Vec3& x) const {
  Vec3 g;
  root_->eval(x, &g);
  return g;
}

double AnalyticSdf::evaluate(const Vec3& x, Vec3* grad) const { return root_->eval(x, grad); }

Box3 AnalyticSdf::bounds() const { return root_->bounds(); }

namespace {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  AnalyticSdf parse_all() {
    AnalyticSdf result = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return result;
  }

 private:
  AnalyticSdf parse_expr() {
    const std::string name = parse_identifier();
    expect('(');
    if (name == "union" || name == "intersection" || name == "difference") {
      AnalyticSdf a = parse_expr();
      expect(',');
      AnalyticSdf b = parse_expr();
      expect(')');
      if (name == "union") return AnalyticSdf::csg_union(a, b);
      if (name == "intersection") return AnalyticSdf::csg_intersection(a, b);
      return AnalyticSdf::csg_difference(a, b);
    }
    std::vector<double> args;
    args.push_back(parse_number());
    while (peek() == ',') {
      ++pos_;
      args.push_back(parse_number());
    }
    expect(')');
    auto need = [&](std::size_t n) {
      if (args.size() != n) {
        fail(name + " expects " + std::to_string(n) + " arguments");
      }
    };
    if (name == "sphere") {
      need(4);
      return AnalyticSdf::sphere({args[0], args[1], args[2]}, args[3]);
    }
    if (name == "box") {
      need(6);
      return AnalyticSdf::box({args[0], args[1], args[2]}, {args[3], args[4], args[5]});
    }
    if (name == "cylinder") {
      need(8);
      return AnalyticSdf::cylinder({args[0], args[1], args[2]}, {args[3], args[4], args[5]},
                                   args[6], args[7]);
    }
    if (name == "halfspace") {
      need(4);
      return AnalyticSdf::half_space({args[0], args[1], args[2]}, args[3]);
    }
    fail("unknown primitive '" + name + "'");
    return AnalyticSdf::sphere(Vec3::Zero(), 1.0);
  }

  std::string parse_identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  double parse_number() {
    skip_space();
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("expected number");
    }
    pos_ += used;
    return v;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("CSG expression: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

AnalyticSdf AnalyticSdf::parse(std::string_view expression) {
  AnalyticSdf sdf = ExpressionParser(expression).parse_all();
  sdf.description_ = std::string(expression);
  return sdf;
}

AnalyticSdf AnalyticSdf::named(std::string_view name) {
  if (name == "sphere") return sphere(Vec3::Zero(), 1.0);
  if (name == "unit-cube") return box(Vec3::Zero(), Vec3::Ones());
  if (name == "handle-block") {
    // Block with two posts and a grip bar on top.
    const AnalyticSdf block = box({-1.0, -0.4, -0.4}, {1.0, 0.4, 0.4});
    const AnalyticSdf post_a = cylinder({-0.7, 0.0, 0.6}, {0, 0, 1}, 0.15, 0.3);
    const AnalyticSdf post_b = cylinder({0.7, 0.0, 0.6}, {0, 0, 1}, 0.15, 0.3);
    const AnalyticSdf grip = cylinder({0.0, 0.0, 0.9}, {1, 0, 0}, 0.15, 0.85);
    AnalyticSdf shape = csg_union(csg_union(block, post_a), csg_union(post_b, grip));
    shape.description_ = "handle-block";
    return shape;
  }
  throw ConfigError("unknown analytic geometry '" + std::string(name) + "'");
}

}  // namespace trigrid
