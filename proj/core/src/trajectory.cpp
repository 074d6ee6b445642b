#include "grasplab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace grasplab::traj {

namespace {

// Natural cubic spline through (t[i], y[i]); returns second derivatives.
std::vector<double> spline_second_derivatives(const std::vector<double>& t,
                                              const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    a[i] = h0 / 6.0;
    b[i] = (h0 + h1) / 3.0;
    c[i] = h1 / 6.0;
    d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
  }
  // Thomas algorithm on rows 1..n-2 (natural ends: m[0] = m[n-1] = 0).
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (d[i] - (i + 1 < n - 1 ? c[i] * m[i + 1] : 0.0)) / b[i];
    if (i == 1) break;
  }
  return m;
}

class CubicSpline {
 public:
  CubicSpline(const std::vector<double>& t, std::vector<double> y)
      : t_(t), y_(std::move(y)), m_(spline_second_derivatives(t, y_)) {}

  double eval(double x, std::size_t seg) const {
    const std::size_t n = t_.size();
    if (n == 2) {
      const double u = (x - t_[0]) / (t_[1] - t_[0]);
      return y_[0] + u * (y_[1] - y_[0]);
    }
    if (n == 3) {
      // Interpolating parabola through the three knots (Lagrange form).
      const double l0 = (x - t_[1]) * (x - t_[2]) / ((t_[0] - t_[1]) * (t_[0] - t_[2]));
      const double l1 = (x - t_[0]) * (x - t_[2]) / ((t_[1] - t_[0]) * (t_[1] - t_[2]));
      const double l2 = (x - t_[0]) * (x - t_[1]) / ((t_[2] - t_[0]) * (t_[2] - t_[1]));
      return y_[0] * l0 + y_[1] * l1 + y_[2] * l2;
    }
    const double h = t_[seg + 1] - t_[seg];
    const double a = (t_[seg + 1] - x) / h;
    const double b = (x - t_[seg]) / h;
    return a * y_[seg] + b * y_[seg + 1] +
           ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * h * h / 6.0;
  }

 private:
  const std::vector<double>& t_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace

Trajectory::Trajectory(std::vector<double> times, std::vector<Pose> poses,
                       std::optional<double> uniform_dt)
    : times_(std::move(times)), poses_(std::move(poses)), uniform_dt_(uniform_dt) {
  if (times_.size() < 2) {
    throw DegenerateTrajectory("trajectory needs at least 2 samples, got " +
                               std::to_string(times_.size()));
  }
  if (times_.size() != poses_.size()) {
    throw DegenerateTrajectory("times/poses length mismatch");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw NonMonotoneTime("time must be strictly increasing at sample " + std::to_string(i));
    }
    if (uniform_dt_ && std::abs((times_[i] - times_[i - 1]) - *uniform_dt_) > kTimeTol) {
      throw NonMonotoneTime("sample spacing deviates from uniform_dt at sample " +
                            std::to_string(i));
    }
  }
  for (auto& p : poses_) p.orientation.normalize();
}

const Trajectory& TrajectorySet::at(std::size_t id) const {
  if (id >= trajectories.size()) {
    throw UnknownTrajectory("trajectory id " + std::to_string(id) + " out of range (set size " +
                            std::to_string(trajectories.size()) + ")");
  }
  return trajectories[id];
}

Trajectory apply_offset(const Trajectory& t, double dx, double dy) {
  std::vector<Pose> poses = t.poses();
  const Vec3 delta(dx, dy, 0.0);
  for (auto& p : poses) p.position += delta;
  return Trajectory(t.times(), std::move(poses), t.uniform_dt());
}

Trajectory time_warp(const Trajectory& t, double ts, double tn) {
  const double old_duration = t.duration();
  const double new_duration = old_duration * ts + tn;
  if (!(new_duration > 0.0)) {
    throw NonPositiveDuration("warped duration " + std::to_string(new_duration) +
                              " (old " + std::to_string(old_duration) + ", ts " +
                              std::to_string(ts) + ", tn " + std::to_string(tn) + ")");
  }
  const double scale = new_duration / old_duration;
  const double t0 = t.start_time();
  std::vector<double> times(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) times[i] = t0 + (t.time(i) - t0) * scale;
  std::optional<double> dt;
  if (t.uniform_dt()) dt = *t.uniform_dt() * scale;
  return Trajectory(std::move(times), t.poses(), dt);
}

Trajectory resample(const Trajectory& t, double dt) {
  if (!(dt > 0.0)) throw NonPositiveDuration("resample dt must be positive");
  if (t.size() < 2) throw DegenerateTrajectory("resample needs at least 2 samples");

  const double t0 = t.start_time();
  const double tend = t.end_time();
  // Smallest K with t0 + K*dt >= tend (up to tolerance), so the uniform grid
  // covers the whole input; the final sample clamps to the end pose.
  auto steps = static_cast<std::size_t>(std::ceil((tend - t0) / dt - kTimeTol));
  if (steps < 1) steps = 1;

  const auto& times = t.times();
  std::vector<double> xs(t.size()), ys(t.size()), zs(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    xs[i] = t.pose(i).position.x();
    ys[i] = t.pose(i).position.y();
    zs[i] = t.pose(i).position.z();
  }
  CubicSpline sx(times, std::move(xs)), sy(times, std::move(ys)), sz(times, std::move(zs));

  // Hemisphere-aligned orientation chain for squad.
  std::vector<Quat> qs(t.size());
  qs[0] = normalized(t.pose(0).orientation);
  for (std::size_t i = 1; i < t.size(); ++i) {
    qs[i] = align_hemisphere(qs[i - 1], normalized(t.pose(i).orientation));
  }

  std::vector<double> out_times(steps + 1);
  std::vector<Pose> out_poses(steps + 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tk = t0 + static_cast<double>(k) * dt;
    const double tq = std::min(tk, tend);  // clamp past-the-end evaluation
    while (seg + 2 < times.size() && times[seg + 1] <= tq) ++seg;
    Pose p;
    p.position = Vec3(sx.eval(tq, seg), sy.eval(tq, seg), sz.eval(tq, seg));
    const double u = (tq - times[seg]) / (times[seg + 1] - times[seg]);
    const Quat& qa = qs[seg];
    const Quat& qb = qs[seg + 1];
    const Quat& qprev = qs[seg == 0 ? 0 : seg - 1];
    const Quat& qnext = qs[std::min(seg + 2, times.size() - 1)];
    p.orientation = squad(qprev, qa, qb, qnext, std::clamp(u, 0.0, 1.0));
    out_times[k] = tk;
    out_poses[k] = p;
  }
  // Snap grid points that coincide with knots to the exact knot pose.
  seg = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tq = std::min(out_times[k], tend);
    while (seg + 1 < times.size() && times[seg] < tq - kTimeTol) ++seg;
    if (std::abs(times[seg] - tq) <= kTimeTol) out_poses[k] = t.pose(seg);
  }
  return Trajectory(std::move(out_times), std::move(out_poses), dt);
}

void export_csv(const Trajectory& t, std::ostream& out) {
  out << "t,x,y,z,qw,qx,qy,qz\n";
  char buf[256];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Pose& p = t.pose(i);
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t.time(i),
                  p.position.x(), p.position.y(), p.position.z(), p.orientation.w(),
                  p.orientation.x(), p.orientation.y(), p.orientation.z());
    out << buf;
  }
}

void export_csv(const Trajectory& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  export_csv(t, out);
  if (!out) throw IoError("write failed: " + path);
}

Trajectory import_csv(std::istream& in, const std::string& origin) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file: " + origin, 1);
  ++line_no;

  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
  };
  if (strip(line) != "t,x,y,z,qw,qx,qy,qz") {
    throw ParseError("expected header 't,x,y,z,qw,qx,qy,qz' in " + origin, line_no);
  }

  std::vector<double> times;
  std::vector<Pose> poses;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    if (std::count(line.begin(), line.end(), ',') != 7) {
      throw ParseError("expected 8 comma-separated fields in " + origin, line_no);
    }
    double v[8];
    std::size_t field = 0, pos = 0;
    while (field < 8) {
      const std::size_t comma = line.find(',', pos);
      const std::string tok = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      char* end = nullptr;
      v[field] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw ParseError("bad number '" + tok + "' in " + origin, line_no);
      }
      ++field;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (field != 8) throw ParseError("expected 8 fields in " + origin, line_no);
    if (!times.empty() && !(v[0] > times.back())) {
      throw NonMonotoneTime("time not increasing at line " + std::to_string(line_no) + " of " +
                            origin);
    }
    times.push_back(v[0]);
    Pose p;
    p.position = Vec3(v[1], v[2], v[3]);
    p.orientation = Quat(v[4], v[5], v[6], v[7]);
    poses.push_back(p);
  }
  if (times.size() < 2) {
    throw ParseError("need at least 2 samples in " + origin, line_no);
  }
  return Trajectory(std::move(times), std::move(poses));
}

Trajectory import_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return import_csv(in, path);
}

TrajectorySet load_trajectory_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      files.push_back(e.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .csv trajectories in " + dir);
  TrajectorySet set;
  set.source = TrajectorySource::kImported;
  for (const auto& f : files) {
    set.trajectories.push_back(import_csv(f));
    set.names.push_back(fs::path(f).stem().string());
  }
  return set;
}

}  // namespace grasplab::traj
