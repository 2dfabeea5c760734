#include "helmqmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace helmqmc {

// ---------------------------------------------------------------------------
// StarObstacle

namespace {
constexpr int kObstacleSamples = 1 << 16;
}

StarObstacle::StarObstacle(std::function<double(double)> radial_fn, std::string name)
    : fn_(std::move(radial_fn)), name_(std::move(name)) {
  r_min_ = std::numeric_limits<double>::infinity();
  r_max_ = 0.0;
  double length = 0.0;
  const double dt = 2.0 * kPi / kObstacleSamples;
  for (int i = 0; i < kObstacleSamples; ++i) {
    const double t = i * dt;
    const double r = fn_(t);
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("StarObstacle: radial function must be positive and finite");
    }
    r_min_ = std::min(r_min_, r);
    r_max_ = std::max(r_max_, r);
    const double dr = derivative(t);
    length += std::sqrt(r * r + dr * dr) * dt;
  }
  perimeter_ = length;
}

StarObstacle StarObstacle::butterfly() {
  return StarObstacle(
      [](double t) {
        const double s = std::sin(t);
        return (0.3 + s * s) * (1.5 + 1.4 * std::cos(2.0 * t));
      },
      "butterfly");
}

StarObstacle StarObstacle::circle(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("StarObstacle::circle: radius must be positive");
  return StarObstacle([radius](double) { return radius; }, "circle");
}

double StarObstacle::derivative(double theta) const {
  constexpr double h = 1e-5;
  return (fn_(theta + h) - fn_(theta - h)) / (2.0 * h);
}

Point2 StarObstacle::point(double theta) const {
  const double r = fn_(theta);
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::vector<double> StarObstacle::equal_arclength_angles(int n) const {
  const int samples = std::max(kObstacleSamples, 64 * n);
  const double dt = 2.0 * kPi / samples;
  std::vector<double> cumulative(static_cast<std::size_t>(samples) + 1, 0.0);
  auto speed = [&](double t) {
    const double r = fn_(t);
    const double dr = derivative(t);
    return std::sqrt(r * r + dr * dr);
  };
  double prev = speed(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double cur = speed(i * dt);
    cumulative[static_cast<std::size_t>(i)] = cumulative[static_cast<std::size_t>(i - 1)] + 0.5 * (prev + cur) * dt;
    prev = cur;
  }
  const double total = cumulative.back();
  std::vector<double> angles(static_cast<std::size_t>(n));
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    const double target = total * i / n;
    while (k + 1 < cumulative.size() && cumulative[k + 1] < target) ++k;
    const double span = cumulative[k + 1] - cumulative[k];
    const double frac = span > 0.0 ? (target - cumulative[k]) / span : 0.0;
    angles[static_cast<std::size_t>(i)] = (static_cast<double>(k) + frac) * dt;
  }
  return angles;
}

// ---------------------------------------------------------------------------
// Quadrature

TriQuadRule quad_rule(int degree) {
  TriQuadRule rule;
  rule.degree = degree;
  auto add_centroid = [&](double w) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(w);
  };
  auto add_orbit3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    rule.points.push_back({a, a, b});
    rule.points.push_back({a, b, a});
    rule.points.push_back({b, a, a});
    rule.weights.insert(rule.weights.end(), 3, w);
  };
  auto add_orbit6 = [&](double a, double b, double w) {
    const double c = 1.0 - a - b;
    rule.points.push_back({a, b, c});
    rule.points.push_back({a, c, b});
    rule.points.push_back({b, a, c});
    rule.points.push_back({b, c, a});
    rule.points.push_back({c, a, b});
    rule.points.push_back({c, b, a});
    rule.weights.insert(rule.weights.end(), 6, w);
  };

  switch (degree) {
    case 1:
      add_centroid(1.0);
      break;
    case 2:
      // edge midpoints
      add_orbit3(0.5, 1.0 / 3.0);
      break;
    case 3:
    case 4:
      add_orbit3(0.44594849091596488632, 0.22338158967801146570);
      add_orbit3(0.09157621350977074346, 0.10995174365532186764);
      rule.degree = 4;
      break;
    case 5: {
      const double s15 = std::sqrt(15.0);
      add_centroid(9.0 / 40.0);
      add_orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
      add_orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
      break;
    }
    case 6:
      add_orbit3(0.24928674517091042129, 0.11678627572637936603);
      add_orbit3(0.06308901449150222834, 0.05084490637020681692);
      add_orbit6(0.05314504984481694735, 0.31035245103378440542, 0.08285107561837357519);
      break;
    default:
      throw std::invalid_argument("quad_rule: unsupported degree " + std::to_string(degree));
  }
  return rule;
}

// ---------------------------------------------------------------------------
// TriMesh

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point2& a = vertices_[static_cast<std::size_t>(tri[0])];
  const Point2& b = vertices_[static_cast<std::size_t>(tri[1])];
  const Point2& c = vertices_[static_cast<std::size_t>(tri[2])];
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) sum += signed_area(t);
  return sum;
}

std::size_t TriMesh::edge_count() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(3 * triangles_.size());
  for (const auto& tri : triangles_) {
    for (int e = 0; e < 3; ++e) {
      auto a = static_cast<std::uint64_t>(tri[static_cast<std::size_t>(e)]);
      auto b = static_cast<std::uint64_t>(tri[static_cast<std::size_t>((e + 1) % 3)]);
      if (a > b) std::swap(a, b);
      keys.push_back((a << 32) | b);
    }
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

double TriMesh::min_angle_degrees() const {
  double worst = 180.0;
  for (const auto& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const Point2& p = vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
      const Point2& q = vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 1) % 3)])];
      const Point2& r = vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>((k + 2) % 3)])];
      const Vec2 u = q - p;
      const Vec2 v = r - p;
      const double angle = std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
      worst = std::min(worst, angle * 180.0 / kPi);
    }
  }
  return worst;
}

std::array<double, 3> TriMesh::barycentric(std::size_t t, const Point2& x) const {
  const auto& tri = triangles_[t];
  const Point2& a = vertices_[static_cast<std::size_t>(tri[0])];
  const Point2& b = vertices_[static_cast<std::size_t>(tri[1])];
  const Point2& c = vertices_[static_cast<std::size_t>(tri[2])];
  const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  const Vec2 d = x - a;
  const double l1 = (d.x() * (c - a).y() - d.y() * (c - a).x()) / det;
  const double l2 = ((b - a).x() * d.y() - (b - a).y() * d.x()) / det;
  return {1.0 - l1 - l2, l1, l2};
}

bool TriMesh::contains(std::size_t t, const Point2& x, double tol) const {
  const auto l = barycentric(t, x);
  return l[0] >= -tol && l[1] >= -tol && l[2] >= -tol;
}

std::optional<std::size_t> TriMesh::locate_polar(const Point2& x) const {
  if (n_theta_ == 0 || ring_radii_.empty()) return std::nullopt;
  // first ring of the all-circular tail
  std::size_t first = ring_radii_.size();
  while (first > 0 && !std::isnan(ring_radii_[first - 1])) --first;
  if (first + 1 >= ring_radii_.size()) return std::nullopt;
  const double r = x.norm();
  if (r < ring_radii_[first] || r > ring_radii_.back()) return std::nullopt;
  auto it = std::upper_bound(ring_radii_.begin() + static_cast<std::ptrdiff_t>(first), ring_radii_.end(), r);
  auto j = static_cast<int>(it - ring_radii_.begin()) - 1;
  const int rings = static_cast<int>(ring_radii_.size());
  j = std::clamp(j, static_cast<int>(first), rings - 2);
  double theta = std::atan2(x.y(), x.x());
  if (theta < 0.0) theta += 2.0 * kPi;
  const int i = static_cast<int>(std::floor(theta * n_theta_ / (2.0 * kPi))) % n_theta_;

  const std::array<std::array<int, 2>, 7> offsets{{{0, 0}, {0, -1}, {0, 1}, {-1, 0}, {1, 0}, {-1, -1}, {1, -1}}};
  for (const auto& off : offsets) {
    const int jj = j + off[1];
    if (jj < 0 || jj > rings - 2) continue;
    const int ii = ((i + off[0]) % n_theta_ + n_theta_) % n_theta_;
    const auto cell = static_cast<std::size_t>(jj * n_theta_ + ii);
    for (int k = 0; k < cell_count_[cell]; ++k) {
      const auto t = static_cast<std::size_t>(cell_first_[cell] + k);
      if (contains(t, x, 1e-12)) return t;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> TriMesh::locate(const Point2& x) const {
  if (auto t = locate_polar(x)) return t;
  if (bucket_nx_ == 0) return std::nullopt;
  const int bx = static_cast<int>(std::floor((x.x() - bucket_origin_.x()) / bucket_size_));
  const int by = static_cast<int>(std::floor((x.y() - bucket_origin_.y()) / bucket_size_));
  if (bx < 0 || by < 0 || bx >= bucket_nx_ || by >= bucket_ny_) return std::nullopt;
  const auto b = static_cast<std::size_t>(by * bucket_nx_ + bx);
  std::optional<std::size_t> best;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (int k = bucket_start_[b]; k < bucket_start_[b + 1]; ++k) {
    const auto t = static_cast<std::size_t>(bucket_items_[static_cast<std::size_t>(k)]);
    const auto l = barycentric(t, x);
    const double slack = std::min({l[0], l[1], l[2]});
    if (slack >= 0.0) return t;
    if (slack > best_slack) {
      best_slack = slack;
      best = t;
    }
  }
  if (best && best_slack >= -1e-12) return best;
  return std::nullopt;
}

void TriMesh::finalize() {
  h_max_ = 0.0;
  Point2 lo = vertices_.front();
  Point2 hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int e = 0; e < 3; ++e) {
      const Point2& a = vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>(e)])];
      const Point2& b = vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>((e + 1) % 3)])];
      h_max_ = std::max(h_max_, (a - b).norm());
    }
    if (!(signed_area(t) > 0.0)) {
      throw std::runtime_error("TriMesh: triangle " + std::to_string(t) + " has nonpositive area");
    }
  }

  const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double mean_size = std::sqrt(std::max(total_area(), 1e-300) / static_cast<double>(triangles_.size()));
  bucket_size_ = std::max(2.0 * mean_size, extent / 1024.0);
  bucket_origin_ = lo - Point2::Constant(1e-9 * extent);
  bucket_nx_ = static_cast<int>(std::ceil((hi.x() - bucket_origin_.x()) / bucket_size_)) + 1;
  bucket_ny_ = static_cast<int>(std::ceil((hi.y() - bucket_origin_.y()) / bucket_size_)) + 1;
  const auto nb = static_cast<std::size_t>(bucket_nx_ * bucket_ny_);
  std::vector<int> counts(nb + 1, 0);
  auto for_each_bucket = [&](std::size_t t, auto&& fn) {
    const auto& tri = triangles_[t];
    Point2 a = vertices_[static_cast<std::size_t>(tri[0])];
    Point2 b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])]);
      b = b.cwiseMax(vertices_[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])]);
    }
    const int x0 = static_cast<int>(std::floor((a.x() - bucket_origin_.x()) / bucket_size_));
    const int x1 = static_cast<int>(std::floor((b.x() - bucket_origin_.x()) / bucket_size_));
    const int y0 = static_cast<int>(std::floor((a.y() - bucket_origin_.y()) / bucket_size_));
    const int y1 = static_cast<int>(std::floor((b.y() - bucket_origin_.y()) / bucket_size_));
    for (int by = std::max(y0, 0); by <= std::min(y1, bucket_ny_ - 1); ++by) {
      for (int bx = std::max(x0, 0); bx <= std::min(x1, bucket_nx_ - 1); ++bx) {
        fn(static_cast<std::size_t>(by * bucket_nx_ + bx));
      }
    }
  };
  for (std::size_t t = 0; t < triangles_.size(); ++t) for_each_bucket(t, [&](std::size_t b) { ++counts[b + 1]; });
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  bucket_start_ = counts;
  bucket_items_.assign(static_cast<std::size_t>(counts.back()), 0);
  std::vector<int> fill(counts.begin(), counts.end() - 1);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for_each_bucket(t, [&](std::size_t b) { bucket_items_[static_cast<std::size_t>(fill[b]++)] = static_cast<int>(t); });
  }
}

void TriMesh::write(std::ostream& os) const {
  os << "vertices " << vertices_.size() << " triangles " << triangles_.size() << '\n';
  os.precision(17);
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    os << vertices_[v].x() << ' ' << vertices_[v].y() << ' ' << static_cast<int>(tags_[v]) << '\n';
  }
  for (const auto& tri : triangles_) os << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
}

TriMesh TriMesh::read(std::istream& is) {
  std::string w1, w2;
  std::size_t nv = 0, nt = 0;
  if (!(is >> w1 >> nv >> w2 >> nt) || w1 != "vertices" || w2 != "triangles") {
    throw std::runtime_error("TriMesh::read: malformed header");
  }
  TriMesh mesh;
  mesh.vertices_.resize(nv);
  mesh.tags_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    int tag = 0;
    if (!(is >> mesh.vertices_[v].x() >> mesh.vertices_[v].y() >> tag) || tag < 0 || tag > 2) {
      throw std::runtime_error("TriMesh::read: malformed vertex line " + std::to_string(v));
    }
    mesh.tags_[v] = static_cast<BoundaryTag>(tag);
  }
  mesh.triangles_.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto& tri = mesh.triangles_[t];
    if (!(is >> tri[0] >> tri[1] >> tri[2])) throw std::runtime_error("TriMesh::read: malformed triangle line");
    for (int k : tri) {
      if (k < 0 || static_cast<std::size_t>(k) >= nv) throw std::runtime_error("TriMesh::read: vertex index out of range");
    }
  }
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

struct Segment {
  double inner = 0.0;  // NaN inner marks the obstacle-blending segment
  double outer = 0.0;
  double ideal = 0.0;
  int count = 0;
};

struct RadialPlan {
  std::vector<Segment> segments;
  double s_boundary = 0.0;  // boundary spacing, blending segment only
  double s_end = 0.0;       // tangential spacing at the blend circle
};

RadialPlan plan_radii(const StarObstacle* obstacle, double r_outer, int n_theta, const MeshOptions& options) {
  const double dtheta = 2.0 * kPi / n_theta;
  const double r_start = obstacle ? obstacle->r_max() : 0.0;
  std::vector<double> knots = options.knots;
  std::sort(knots.begin(), knots.end());
  std::vector<double> kept;
  double prev = obstacle ? 1.5 * r_start : 0.0;
  for (double k : knots) {
    if (k <= prev) continue;
    const double gap = options.min_gap_fraction * dtheta * k;
    if (k - prev < gap || r_outer - k < gap) continue;
    kept.push_back(k);
    prev = k;
  }

  RadialPlan plan;
  std::vector<double> edges;
  if (obstacle) {
    const double r_blend = kept.empty() ? r_outer : kept.front();
    double mean_r = 0.0;
    constexpr int samples = 4096;
    for (int i = 0; i < samples; ++i) mean_r += obstacle->radius(2.0 * kPi * i / samples);
    mean_r /= samples;
    const double length = r_blend - mean_r;
    plan.s_boundary = obstacle->perimeter() / n_theta;
    plan.s_end = r_blend * dtheta;
    Segment blend{std::numeric_limits<double>::quiet_NaN(), r_blend, 0.0, 0};
    const double s0 = plan.s_boundary;
    const double s1 = plan.s_end;
    blend.ideal = std::abs(s1 - s0) < 1e-12 * s1 ? length / s0 : length * std::log(s1 / s0) / (s1 - s0);
    plan.segments.push_back(blend);
    edges = kept.empty() ? std::vector<double>{} : kept;
    if (!kept.empty()) edges.push_back(r_outer);
  } else {
    edges.push_back(0.0);
    edges.insert(edges.end(), kept.begin(), kept.end());
    edges.push_back(r_outer);
  }
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    Segment seg{edges[e], edges[e + 1], 0.0, 0};
    // the disk uses the outer tangential spacing throughout
    const double spacing = obstacle ? dtheta * 0.5 * (seg.inner + seg.outer) : dtheta * r_outer;
    seg.ideal = (seg.outer - seg.inner) / spacing;
    const double mid = 0.5 * (seg.inner + seg.outer);
    for (const auto& band : options.refinements) {
      if (mid >= band.from && mid <= band.to) seg.ideal *= band.factor;
    }
    plan.segments.push_back(seg);
  }
  return plan;
}

void allocate_counts(RadialPlan& plan, int n_radial) {
  auto& segs = plan.segments;
  if (n_radial <= 0) {
    for (auto& s : segs) s.count = std::max(1, static_cast<int>(std::lround(s.ideal)));
    return;
  }
  if (n_radial < static_cast<int>(segs.size())) {
    throw std::invalid_argument("mesh: n_radial = " + std::to_string(n_radial) + " is below the " +
                                std::to_string(segs.size()) + " knot-aligned radial segments");
  }
  double total = 0.0;
  for (const auto& s : segs) total += s.ideal;
  std::vector<double> remainder(segs.size());
  int used = 0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double share = n_radial * segs[k].ideal / total;
    segs[k].count = std::max(1, static_cast<int>(std::floor(share)));
    remainder[k] = share - std::floor(share);
    used += segs[k].count;
  }
  while (used < n_radial) {
    const auto k = static_cast<std::size_t>(std::max_element(remainder.begin(), remainder.end()) - remainder.begin());
    ++segs[k].count;
    remainder[k] = -1.0;
    ++used;
    if (std::all_of(remainder.begin(), remainder.end(), [](double r) { return r < 0.0; })) {
      for (std::size_t m = 0; m < segs.size(); ++m) remainder[m] = segs[m].ideal / segs[m].count;
    }
  }
  while (used > n_radial) {
    auto it = std::max_element(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.count < b.count; });
    --it->count;
    --used;
  }
}

// Splits the quad (v00, v10, v11, v01) along its shorter diagonal and
// appends positively oriented triangles.
void split_quad(const std::vector<Point2>& verts, int v00, int v10, int v11, int v01, int parity,
                std::vector<std::array<int, 3>>& out) {
  auto at = [&](int v) -> const Point2& { return verts[static_cast<std::size_t>(v)]; };
  const double d1 = (at(v00) - at(v11)).norm();
  const double d2 = (at(v10) - at(v01)).norm();
  bool main_diagonal;
  if (d1 < d2 * (1.0 - 1e-9)) {
    main_diagonal = true;
  } else if (d2 < d1 * (1.0 - 1e-9)) {
    main_diagonal = false;
  } else {
    main_diagonal = parity % 2 == 0;
  }
  auto push = [&](int a, int b, int c) {
    const Vec2 u = at(b) - at(a);
    const Vec2 w = at(c) - at(a);
    if (u.x() * w.y() - u.y() * w.x() < 0.0) std::swap(b, c);
    out.push_back({a, b, c});
  };
  if (main_diagonal) {
    push(v00, v10, v11);
    push(v00, v11, v01);
  } else {
    push(v00, v10, v01);
    push(v10, v11, v01);
  }
}

}  // namespace

int suggested_radial_count(const StarObstacle& obstacle, double r_outer, int n_theta, const MeshOptions& options) {
  RadialPlan plan = plan_radii(&obstacle, r_outer, n_theta, options);
  allocate_counts(plan, 0);
  int total = 0;
  for (const auto& s : plan.segments) total += s.count;
  return total;
}

TriMesh mesh_annulus(const StarObstacle& obstacle, double r_outer, int n_theta, int n_radial, const MeshOptions& options) {
  if (n_theta < 8 || n_theta % 2 != 0) throw std::invalid_argument("mesh_annulus: n_theta must be even and at least 8");
  if (n_radial != 0 && n_radial < 2) throw std::invalid_argument("mesh_annulus: n_radial must be at least 2");
  if (!(obstacle.r_max() < r_outer)) {
    throw std::invalid_argument("mesh_annulus: obstacle reaches the outer circle");
  }

  RadialPlan plan = plan_radii(&obstacle, r_outer, n_theta, options);
  allocate_counts(plan, n_radial);

  const double dtheta = 2.0 * kPi / n_theta;
  const auto n = static_cast<std::size_t>(n_theta);
  TriMesh mesh;
  mesh.n_theta_ = n_theta;

  // Blending rings.
  const Segment& blend = plan.segments.front();
  const int m = blend.count;
  std::vector<double> t(static_cast<std::size_t>(m) + 1, 0.0);
  {
    const double ratio = m > 1 ? std::pow(plan.s_end / plan.s_boundary, 1.0 / (m - 1)) : 1.0;
    double acc = 0.0, step = 1.0;
    for (int j = 1; j <= m; ++j) {
      acc += step;
      t[static_cast<std::size_t>(j)] = acc;
      step *= ratio;
    }
    for (auto& v : t) v /= acc;
  }
  const std::vector<double> boundary_angles = obstacle.equal_arclength_angles(n_theta);
  std::vector<Point2> inner(n), outer(n);
  for (std::size_t i = 0; i < n; ++i) {
    inner[i] = obstacle.point(boundary_angles[i]);
    const double th = dtheta * static_cast<double>(i);
    outer[i] = blend.outer * Point2(std::cos(th), std::sin(th));
  }
  for (int j = 0; j <= m; ++j) {
    const double tj = t[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < n; ++i) {
      if (j == 0) {
        mesh.vertices_.push_back(inner[i]);
      } else if (j == m) {
        mesh.vertices_.push_back(outer[i]);
      } else {
        mesh.vertices_.push_back((1.0 - tj) * inner[i] + tj * outer[i]);
      }
    }
    mesh.ring_radii_.push_back(j == m ? blend.outer : std::numeric_limits<double>::quiet_NaN());
  }

  // Circular rings.
  for (std::size_t k = 1; k < plan.segments.size(); ++k) {
    const Segment& seg = plan.segments[k];
    for (int l = 1; l <= seg.count; ++l) {
      const double r = l == seg.count ? seg.outer : seg.inner + (seg.outer - seg.inner) * l / seg.count;
      for (std::size_t i = 0; i < n; ++i) {
        const double th = dtheta * static_cast<double>(i);
        mesh.vertices_.emplace_back(r * std::cos(th), r * std::sin(th));
      }
      mesh.ring_radii_.push_back(r);
    }
  }

  const std::size_t rings = mesh.ring_radii_.size();
  mesh.tags_.assign(mesh.vertices_.size(), BoundaryTag::interior);
  for (std::size_t i = 0; i < n; ++i) {
    mesh.tags_[i] = BoundaryTag::obstacle;
    mesh.tags_[(rings - 1) * n + i] = BoundaryTag::outer;
  }

  for (std::size_t j = 0; j + 1 < rings; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n;
      mesh.cell_first_.push_back(static_cast<int>(mesh.triangles_.size()));
      split_quad(mesh.vertices_, static_cast<int>(j * n + i), static_cast<int>(j * n + ip),
                 static_cast<int>((j + 1) * n + ip), static_cast<int>((j + 1) * n + i), static_cast<int>(i + j),
                 mesh.triangles_);
      mesh.cell_count_.push_back(2);
    }
  }
  mesh.finalize();
  return mesh;
}

TriMesh mesh_disk(double r_outer, int n_theta, int n_radial, const MeshOptions& options) {
  if (n_theta < 8 || n_theta % 2 != 0) throw std::invalid_argument("mesh_disk: n_theta must be even and at least 8");
  if (n_radial < 0) throw std::invalid_argument("mesh_disk: n_radial must be nonnegative");
  if (!(r_outer > 0.0)) throw std::invalid_argument("mesh_disk: radius must be positive");

  RadialPlan plan = plan_radii(nullptr, r_outer, n_theta, options);
  allocate_counts(plan, n_radial);

  const double dtheta = 2.0 * kPi / n_theta;
  const auto n = static_cast<std::size_t>(n_theta);
  TriMesh mesh;
  mesh.n_theta_ = n_theta;
  mesh.has_center_ = true;
  mesh.vertices_.emplace_back(0.0, 0.0);
  mesh.ring_radii_.push_back(0.0);
  for (const Segment& seg : plan.segments) {
    for (int l = 1; l <= seg.count; ++l) {
      const double r = l == seg.count ? seg.outer : seg.inner + (seg.outer - seg.inner) * l / seg.count;
      for (std::size_t i = 0; i < n; ++i) {
        const double th = dtheta * static_cast<double>(i);
        mesh.vertices_.emplace_back(r * std::cos(th), r * std::sin(th));
      }
      mesh.ring_radii_.push_back(r);
    }
  }
  const std::size_t rings = mesh.ring_radii_.size();  // includes the centre
  mesh.tags_.assign(mesh.vertices_.size(), BoundaryTag::interior);
  for (std::size_t i = 0; i < n; ++i) mesh.tags_[1 + (rings - 2) * n + i] = BoundaryTag::outer;

  auto ring_vertex = [&](std::size_t j, std::size_t i) { return static_cast<int>(1 + (j - 1) * n + i); };
  for (std::size_t i = 0; i < n; ++i) {
    mesh.cell_first_.push_back(static_cast<int>(mesh.triangles_.size()));
    mesh.triangles_.push_back({0, ring_vertex(1, i), ring_vertex(1, (i + 1) % n)});
    mesh.cell_count_.push_back(1);
  }
  for (std::size_t j = 1; j + 1 < rings; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n;
      mesh.cell_first_.push_back(static_cast<int>(mesh.triangles_.size()));
      split_quad(mesh.vertices_, ring_vertex(j, i), ring_vertex(j, ip), ring_vertex(j + 1, ip), ring_vertex(j + 1, i),
                 static_cast<int>(i + j), mesh.triangles_);
      mesh.cell_count_.push_back(2);
    }
  }
  mesh.finalize();
  return mesh;
}

}  // namespace helmqmc
