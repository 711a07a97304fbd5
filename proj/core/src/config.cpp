#include "robinfb/config.hpp"

#include <cmath>

#include "json.hpp"
#include "json_detail.hpp"

namespace robinfb {

using nlohmann::json;

namespace {

std::vector<double> parse_axis(const json& j, const std::string& field) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
    return out;
  }
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
    if (out.empty()) throw InputError(field, "range list must be nonempty");
    return out;
  }
  if (j.is_object()) {
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const double step = j.at("step").get<double>();
    if (step <= 0.0) throw InputError(field, "step must be positive");
    if (hi < lo) throw InputError(field, "max must be >= min");
    for (double v = lo; v <= hi + 1e-12 * step; v += step) out.push_back(v);
    return out;
  }
  throw InputError(field, "expected number, list, or {min,max,step}");
}

SolverParams parse_params(const json& j) {
  SolverParams p;
  p.eps0 = j.value("eps0", p.eps0);
  p.eps_factor = j.value("eps_factor", p.eps_factor);
  p.eps_steps = j.value("eps_steps", p.eps_steps);
  p.u_tol = j.value("u_tol", p.u_tol);
  p.max_sweeps = j.value("max_sweeps", p.max_sweeps);
  p.seed = j.value("seed", p.seed);
  p.r_init = j.value("r_init", p.r_init);
  p.forbid_interface = j.value("forbid_interface", p.forbid_interface);
  if (j.contains("anneal")) {
    p.anneal.enabled = j.at("anneal").value("enabled", false);
    p.anneal.t0 = j.at("anneal").value("t0", 0.0);
  }
  try {
    p.validate_or_throw();
  } catch (const InputError& e) {
    throw InputError(std::string("params.") + e.field, e.what());
  }
  return p;
}

DiagnosticsOptions parse_diag(const json& j) {
  DiagnosticsOptions d;
  if (j.contains("enabled")) {
    d.fb = d.robin = d.weiss = d.blowup = d.density_growth = d.holder =
        d.non_collapsing = d.contact = d.minimality = d.conformal = false;
    for (const auto& v : j.at("enabled")) {
      const std::string name = v.get<std::string>();
      if (name == "free_boundary") d.fb = true;
      else if (name == "robin") d.robin = true;
      else if (name == "weiss") d.weiss = true;
      else if (name == "blowup") d.blowup = true;
      else if (name == "density_growth") d.density_growth = true;
      else if (name == "holder") d.holder = true;
      else if (name == "non_collapsing") d.non_collapsing = true;
      else if (name == "contact_angle") d.contact = true;
      else if (name == "interface_minimality") d.minimality = true;
      else if (name == "conformal") d.conformal = true;
      else throw InputError("diagnostics.enabled", "unknown diagnostic: " + name);
    }
  }
  d.delta = j.value("delta", d.delta);
  d.holder_exponent = j.value("holder_exponent", d.holder_exponent);
  if (j.contains("r_ladder_h")) {
    d.r_ladder_h.clear();
    for (const auto& v : j.at("r_ladder_h")) d.r_ladder_h.push_back(v.get<double>());
    if (d.r_ladder_h.empty())
      throw InputError("diagnostics.r_ladder_h", "ladder must be nonempty");
  }
  d.max_points = j.value("max_points", d.max_points);
  d.minimality_window = j.value("window", d.minimality_window);
  d.minimality_windows = j.value("windows", d.minimality_windows);
  d.seed = j.value("seed", d.seed);
  if (j.contains("ball")) {
    d.ball_cx = j.at("ball").at("center").at(0).get<double>();
    d.ball_cy = j.at("ball").at("center").at(1).get<double>();
    d.ball_r = j.at("ball").at("radius").get<double>();
  }
  return d;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("(document)", std::string("invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  std::string mode;
  try {
    mode = j.at("mode").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError("mode", e.what());
  }
  if (mode == "solve1d") cfg.mode = RunMode::Solve1D;
  else if (mode == "solve2d") cfg.mode = RunMode::Solve2D;
  else if (mode == "sweep1d") cfg.mode = RunMode::Sweep1D;
  else if (mode == "sweep2d") cfg.mode = RunMode::Sweep2D;
  else if (mode == "diagnose") cfg.mode = RunMode::Diagnose;
  else throw InputError("mode", "unknown mode: " + mode);

  cfg.out_dir = j.value("out_dir", std::string("."));
  cfg.workers = j.value("workers", 1);
  if (cfg.workers < 1) throw InputError("workers", "workers must be >= 1");

  const bool needs_spec = cfg.mode == RunMode::Solve2D ||
                          cfg.mode == RunMode::Sweep2D ||
                          cfg.mode == RunMode::Diagnose;
  if (j.contains("spec")) {
    cfg.spec = spec_from_json_value(j.at("spec"));
    cfg.has_spec = true;
  } else if (needs_spec) {
    throw InputError("spec", "missing for mode " + mode);
  }
  if (j.contains("params")) cfg.params = parse_params(j.at("params"));
  if (j.contains("diagnostics")) cfg.diagnostics = parse_diag(j.at("diagnostics"));

  if (j.contains("oned")) {
    const json& o = j.at("oned");
    try {
      if (o.contains("beta")) cfg.oned_beta = parse_axis(o.at("beta"), "oned.beta");
      if (o.contains("eps")) cfg.oned_eps = parse_axis(o.at("eps"), "oned.eps");
      cfg.oned_n = o.value("n", cfg.oned_n);
    } catch (const json::exception& e) {
      throw InputError("oned", e.what());
    }
    for (const double b : cfg.oned_beta)
      if (b <= 0.0) throw InputError("oned.beta", "beta must be > 0");
    for (const double e : cfg.oned_eps)
      if (e < 0.0) throw InputError("oned.eps", "eps must be >= 0");
    if (cfg.oned_n < 64) throw InputError("oned.n", "n must be >= 64");
  } else if (cfg.mode == RunMode::Solve1D || cfg.mode == RunMode::Sweep1D) {
    throw InputError("oned", "missing for mode " + mode);
  }

  if (j.contains("sweep2d")) {
    const json& s = j.at("sweep2d");
    if (s.contains("beta")) cfg.sweep_beta = parse_axis(s.at("beta"), "sweep2d.beta");
    if (s.contains("lambda"))
      cfg.sweep_lambda = parse_axis(s.at("lambda"), "sweep2d.lambda");
    for (const double b : cfg.sweep_beta)
      if (b < 0.0) throw InputError("sweep2d.beta", "beta must be >= 0");
    for (const double l : cfg.sweep_lambda)
      if (l <= 0.0) throw InputError("sweep2d.lambda", "lambda must be > 0");
  } else if (cfg.mode == RunMode::Sweep2D) {
    throw InputError("sweep2d", "missing for mode sweep2d");
  }

  cfg.state_path = j.value("state", std::string());
  return cfg;
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Solve1D: return "solve1d";
    case RunMode::Solve2D: return "solve2d";
    case RunMode::Sweep1D: return "sweep1d";
    case RunMode::Sweep2D: return "sweep2d";
    case RunMode::Diagnose: return "diagnose";
  }
  return "?";
}

std::string config_schema() {
  // Kept in sync with parse_config; the parser is the enforcement point.
  static const char* schema = R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "robinfb run configuration",
  "type": "object",
  "required": ["mode"],
  "properties": {
    "mode": {"enum": ["solve1d", "solve2d", "sweep1d", "sweep2d", "diagnose"]},
    "out_dir": {"type": "string", "default": "."},
    "workers": {"type": "integer", "minimum": 1, "default": 1},
    "spec": {
      "type": "object",
      "required": ["box", "resolution", "shapes_e1"],
      "properties": {
        "box": {
          "type": "object",
          "properties": {
            "origin": {"type": "array", "items": {"type": "number"}},
            "width": {"type": "number", "exclusiveMinimum": 0},
            "height": {"type": "number", "exclusiveMinimum": 0}
          }
        },
        "resolution": {"type": "integer", "minimum": 8},
        "shapes_e1": {"$ref": "#/definitions/shapes"},
        "shapes_e2": {"$ref": "#/definitions/shapes"},
        "beta": {"type": "number", "minimum": 0, "default": 1.0},
        "lambda": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
        "g_value": {"type": "number", "exclusiveMinimum": 0, "default": 1.0},
        "one_phase_mode": {"type": "boolean", "default": false},
        "strip_mode": {"type": "boolean", "default": false}
      }
    },
    "params": {
      "type": "object",
      "properties": {
        "eps0": {"type": "number", "exclusiveMinimum": 0, "default": 0.1},
        "eps_factor": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1, "default": 0.5},
        "eps_steps": {"type": "integer", "minimum": 1, "default": 12},
        "u_tol": {"type": "number", "exclusiveMinimum": 0, "default": 1e-10},
        "max_sweeps": {"type": "integer", "minimum": 1, "default": 200},
        "seed": {"type": "integer", "default": 12345},
        "r_init": {"type": "number", "default": 0.0},
        "forbid_interface": {"type": "boolean", "default": false},
        "anneal": {
          "type": "object",
          "properties": {
            "enabled": {"type": "boolean", "default": false},
            "t0": {"type": "number", "default": 0.0}
          }
        }
      }
    },
    "oned": {
      "type": "object",
      "properties": {
        "beta": {"$ref": "#/definitions/axis"},
        "eps": {"$ref": "#/definitions/axis"},
        "n": {"type": "integer", "minimum": 64, "default": 4096}
      }
    },
    "sweep2d": {
      "type": "object",
      "properties": {
        "beta": {"$ref": "#/definitions/axis"},
        "lambda": {"$ref": "#/definitions/axis"}
      }
    },
    "diagnostics": {
      "type": "object",
      "properties": {
        "enabled": {"type": "array", "items": {"enum": [
          "free_boundary", "robin", "weiss", "blowup", "density_growth",
          "holder", "non_collapsing", "contact_angle",
          "interface_minimality", "conformal"]}},
        "delta": {"type": "number", "default": 0.0},
        "holder_exponent": {"type": "number", "default": 0.3333333333333333},
        "r_ladder_h": {"type": "array", "items": {"type": "number"},
                       "default": [32, 16, 8]},
        "max_points": {"type": "integer", "default": 24},
        "window": {"type": "integer", "default": 8},
        "windows": {"type": "integer", "default": 100},
        "seed": {"type": "integer", "default": 31337},
        "ball": {
          "type": "object",
          "properties": {
            "center": {"type": "array", "items": {"type": "number"}},
            "radius": {"type": "number", "exclusiveMinimum": 0}
          }
        }
      }
    },
    "state": {"type": "string",
              "description": "state JSON to diagnose; solved fresh if absent"}
  },
  "definitions": {
    "axis": {
      "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
        {"type": "object", "required": ["min", "max", "step"],
         "properties": {
           "min": {"type": "number"},
           "max": {"type": "number"},
           "step": {"type": "number", "exclusiveMinimum": 0}
         }}
      ]
    },
    "shapes": {
      "type": "array",
      "items": {
        "oneOf": [
          {"type": "object", "required": ["type", "center", "radius"],
           "properties": {
             "type": {"const": "disk"},
             "center": {"type": "array", "items": {"type": "number"}},
             "radius": {"type": "number", "exclusiveMinimum": 0}
           }},
          {"type": "object", "required": ["type", "corner", "extents"],
           "properties": {
             "type": {"const": "rect"},
             "corner": {"type": "array", "items": {"type": "number"}},
             "extents": {"type": "array", "items": {"type": "number"}}
           }}
        ]
      }
    }
  }
}
)";
  return schema;
}

}  // namespace robinfb
