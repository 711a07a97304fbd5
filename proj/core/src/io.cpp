#include "robinfb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "json_detail.hpp"

namespace robinfb {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json shape_to_json(const Shape& s) {
  if (const Disk* d = std::get_if<Disk>(&s))
    return {{"type", "disk"}, {"center", {d->cx, d->cy}}, {"radius", d->radius}};
  const Rect& r = std::get<Rect>(s);
  return {{"type", "rect"}, {"corner", {r.x0, r.y0}}, {"extents", {r.wx, r.wy}}};
}

Shape shape_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "disk") {
    Disk d;
    d.cx = j.at("center").at(0).get<double>();
    d.cy = j.at("center").at(1).get<double>();
    d.radius = j.at("radius").get<double>();
    return d;
  }
  if (type == "rect") {
    Rect r;
    r.x0 = j.at("corner").at(0).get<double>();
    r.y0 = j.at("corner").at(1).get<double>();
    r.wx = j.at("extents").at(0).get<double>();
    r.wy = j.at("extents").at(1).get<double>();
    return r;
  }
  throw InputError("shape.type", "unknown shape type: " + type);
}

}  // namespace

std::string state_to_json(const State& st) {
  json j;
  j["grid"] = {{"nx", st.grid.nx},
               {"ny", st.grid.ny},
               {"h", st.grid.h},
               {"origin", {st.grid.origin_x, st.grid.origin_y}}};
  j["g_value"] = st.g_value;
  j["strip_mode"] = st.strip_mode;
  j["u"] = st.u;
  json labs = json::array();
  for (Label l : st.labels) labs.push_back(static_cast<int>(l));
  j["labels"] = std::move(labs);
  return j.dump();
}

State state_from_json(const std::string& text) {
  json j = json::parse(text);
  State st;
  st.grid.nx = j.at("grid").at("nx").get<int>();
  st.grid.ny = j.at("grid").at("ny").get<int>();
  st.grid.h = j.at("grid").at("h").get<double>();
  st.grid.origin_x = j.at("grid").at("origin").at(0).get<double>();
  st.grid.origin_y = j.at("grid").at("origin").at(1).get<double>();
  st.g_value = j.at("g_value").get<double>();
  st.strip_mode = j.value("strip_mode", false);
  st.u = j.at("u").get<std::vector<double>>();
  for (const auto& v : j.at("labels")) {
    const int k = v.get<int>();
    if (k < 0 || k > 4) throw InputError("labels", "label out of range 0-4");
    st.labels.push_back(static_cast<Label>(k));
  }
  if (st.u.size() != st.grid.size() || st.labels.size() != st.grid.size())
    throw InputError("u", "field size does not match grid");
  return st;
}

std::string spec_to_json(const ProblemSpec& sp) {
  json j;
  j["box"] = {{"origin", {sp.box.x0, sp.box.y0}},
              {"width", sp.box.width},
              {"height", sp.box.height}};
  j["resolution"] = sp.resolution;
  j["shapes_e1"] = json::array();
  for (const Shape& s : sp.shapes_e1) j["shapes_e1"].push_back(shape_to_json(s));
  j["shapes_e2"] = json::array();
  for (const Shape& s : sp.shapes_e2) j["shapes_e2"].push_back(shape_to_json(s));
  j["beta"] = sp.beta;
  j["lambda"] = sp.lambda;
  j["g_value"] = sp.g_value;
  j["one_phase_mode"] = sp.one_phase_mode;
  j["strip_mode"] = sp.strip_mode;
  return j.dump(2);
}

ProblemSpec spec_from_json_value(const json& j) {
  ProblemSpec sp;
  try {
    const json& b = j.at("box");
    sp.box.x0 = b.at("origin").at(0).get<double>();
    sp.box.y0 = b.at("origin").at(1).get<double>();
    sp.box.width = b.at("width").get<double>();
    sp.box.height = b.at("height").get<double>();
  } catch (const json::exception& e) {
    throw InputError("spec.box", e.what());
  }
  try {
    sp.resolution = j.at("resolution").get<int>();
  } catch (const json::exception& e) {
    throw InputError("spec.resolution", e.what());
  }
  try {
    for (const auto& s : j.value("shapes_e1", json::array()))
      sp.shapes_e1.push_back(shape_from_json(s));
    for (const auto& s : j.value("shapes_e2", json::array()))
      sp.shapes_e2.push_back(shape_from_json(s));
  } catch (const json::exception& e) {
    throw InputError("spec.shapes", e.what());
  }
  sp.beta = j.value("beta", 1.0);
  sp.lambda = j.value("lambda", 1.0);
  sp.g_value = j.value("g_value", 1.0);
  sp.one_phase_mode = j.value("one_phase_mode", false);
  sp.strip_mode = j.value("strip_mode", false);
  if (sp.beta < 0.0) throw InputError("spec.beta", "beta must be >= 0");
  if (sp.lambda <= 0.0) throw InputError("spec.lambda", "lambda must be > 0");
  if (sp.resolution < 8)
    throw InputError("spec.resolution", "resolution must be >= 8");
  return sp;
}

ProblemSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("spec", std::string("invalid JSON: ") + e.what());
  }
  return spec_from_json_value(j);
}

std::string pgm_from_u(const State& st) {
  std::string out = "P5\n" + std::to_string(st.grid.nx) + " " +
                    std::to_string(st.grid.ny) + "\n255\n";
  out.reserve(out.size() + st.grid.size());
  for (int j = st.grid.ny - 1; j >= 0; --j)
    for (int i = 0; i < st.grid.nx; ++i) {
      const double v = st.at(i, j) * 255.0 / st.g_value;
      const long b = std::lround(std::min(255.0, std::max(0.0, v)));
      out.push_back(static_cast<char>(static_cast<unsigned char>(b)));
    }
  return out;
}

std::string pgm_from_labels(const State& st) {
  static constexpr unsigned char map[5] = {0, 96, 160, 224, 255};
  std::string out = "P5\n" + std::to_string(st.grid.nx) + " " +
                    std::to_string(st.grid.ny) + "\n255\n";
  out.reserve(out.size() + st.grid.size());
  for (int j = st.grid.ny - 1; j >= 0; --j)
    for (int i = 0; i < st.grid.nx; ++i)
      out.push_back(
          static_cast<char>(map[static_cast<int>(st.lab(i, j))]));
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fb_residuals_csv(const DiagnosticsReport& rep) {
  std::string s = "i,j,grad,residual\n";
  for (const auto& r : rep.fb_residuals)
    s += std::to_string(r.i) + "," + std::to_string(r.j) + "," +
         fmt17(r.grad_mag) + "," + fmt17(r.residual) + "\n";
  return s;
}

std::string robin_residuals_csv(const DiagnosticsReport& rep) {
  std::string s = "i,j,axis,grad1,grad2,trace,residual,degenerate\n";
  for (const auto& r : rep.robin_residuals)
    s += std::to_string(r.i) + "," + std::to_string(r.j) + "," +
         std::to_string(r.axis) + "," + fmt17(r.grad1) + "," + fmt17(r.grad2) +
         "," + fmt17(r.trace) + "," + fmt17(r.residual) + "," +
         (r.degenerate ? "1" : "0") + "\n";
  return s;
}

std::string weiss_csv(const DiagnosticsReport& rep) {
  std::string s = "x0,y0,r,W\n";
  for (const auto& w : rep.weiss)
    s += fmt17(w.x0) + "," + fmt17(w.y0) + "," + fmt17(w.r) + "," +
         fmt17(w.w) + "\n";
  return s;
}

std::string blowup_csv(const DiagnosticsReport& rep) {
  std::string s = "x0,y0,r,nu_x,nu_y,linf\n";
  for (const auto& b : rep.blowup_errors)
    s += fmt17(b.x0) + "," + fmt17(b.y0) + "," + fmt17(b.r) + "," +
         fmt17(b.nu_x) + "," + fmt17(b.nu_y) + "," + fmt17(b.linf) + "\n";
  return s;
}

std::string density_growth_csv(const DiagnosticsReport& rep) {
  std::string s = "x0,y0,r,density,sup_over_r\n";
  for (const auto& d : rep.density_growth)
    s += fmt17(d.x0) + "," + fmt17(d.y0) + "," + fmt17(d.r) + "," +
         fmt17(d.density) + "," + fmt17(d.sup_over_r) + "\n";
  return s;
}

std::string contact_angles_csv(const DiagnosticsReport& rep) {
  std::string s = "x,y,angle_deg\n";
  for (const auto& c : rep.contact_angles)
    s += fmt17(c.x) + "," + fmt17(c.y) + "," + fmt17(c.angle_deg) + "\n";
  return s;
}

}  // namespace robinfb
