#pragma once

// Certificate files: structured text records of every check with exact
// hexadecimal float endpoints (authoritative) next to decimal renderings.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "veritor/circle.hpp"
#include "veritor/config.hpp"
#include "veritor/connection.hpp"
#include "veritor/interval.hpp"
#include "veritor/newton.hpp"
#include "veritor/version.hpp"

namespace veritor {

inline std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline std::string dec_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string cert_interval(const Interval& v) {
  return "[" + hex_double(v.lo) + ", " + hex_double(v.hi) + "] ~ [" +
         dec_double(v.lo) + ", " + dec_double(v.hi) + "]";
}

inline std::string cert_matrix(const IMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      out += "  [" + std::to_string(i) + "][" + std::to_string(j) +
             "] = " + cert_interval(m(i, j)) + "\n";
  return out;
}

inline void cert_header(std::ostream& os, const std::string& task,
                        const Config& cfg) {
  os << "certificate-version: 1\n";
  os << "tool: veritor " << kVersion << "\n";
  os << "task: " << task << "\n";
  os << "\n[config]\n";
  for (const std::string& line : cfg.raw_lines()) os << "  " << line << "\n";
  os << "[/config]\n\n";
}

inline void cert_check(std::ostream& os, const std::string& name, bool ran,
                       bool ok, const std::string& detail = "") {
  os << "check " << name << ": " << (!ran ? "skipped" : ok ? "pass" : "FAIL");
  if (!detail.empty()) os << "  (" << detail << ")";
  os << "\n";
}

inline void write_circle_certificate(std::ostream& os,
                                     const CircleCertificate& cert,
                                     const Config& cfg, double wall_seconds) {
  cert_header(os, "verify-circle", cfg);
  os << "map: " << cert.map_description << "\n";
  os << "charts: " << cert.atlas.size() << "\n";
  os << "subdivision: " << cert.atlas.subdivision << "\n";
  os << "star-center: (" << hex_double(cert.atlas.star_center[0]) << ", "
     << hex_double(cert.atlas.star_center[1]) << ")\n\n";

  cert_check(os, "chart-overlap", true, cert.overlap_ok);
  cert_check(os, "well-aligned", cert.overlap_ok, cert.well_aligned,
             cert.overlap_ok
                 ? "worst margin " + dec_double(cert.alignment.worst_margin) +
                       " at chart " + std::to_string(cert.alignment.worst_chart)
                 : "");
  cert_check(os, "seed-curve-cones", cert.well_aligned, cert.seed_curve);
  cert_check(os, "covering", cert.seed_curve, cert.covering,
             !cert.covering && cert.witness_chart >= 0
                 ? "chart " + std::to_string(cert.witness_chart) +
                       " fragment " + std::to_string(cert.witness_fragment)
                 : "");
  cert_check(os, "contraction", cert.seed_curve, cert.contraction,
             "sup |det Df| = " + dec_double(cert.lambda.hi));
  cert_check(os, "map-cones", cert.covering && cert.contraction,
             cert.map_cones);

  os << "\n[values]\n";
  os << "lambda = " << cert_interval(cert.lambda) << "\n";
  os << "xi = " << cert_interval(cert.rate.xi) << "\n";
  os << "mu = " << cert_interval(cert.rate.mu) << "\n";
  os << "k-max = " << cert.rate.k_max << "\n";
  os << "lipschitz-only = " << (cert.rate.lipschitz_only ? "yes" : "no")
     << "\n";
  os << "fragments = " << cert.fragments.fragments.size() << "\n";
  os << "[/values]\n\n";

  if (cert.has_conclusion) {
    os << "conclusion: " << cert.conclusion << "\n";
    if (cert.torus_promotion)
      os << "torus-promotion: the certified circle of the section map is an "
            "attracting invariant torus of the underlying flow\n";
    os << "status: verified\n";
  } else {
    os << "failure: " << cert.failure << "\n";
    os << "status: failed\n";
  }
  os << "wall-seconds: " << dec_double(wall_seconds) << "\n";
}

inline void write_connection_certificate(std::ostream& os,
                                         const ConnectionCertificate& cert,
                                         const ConnectionProblem& prob,
                                         const Config& cfg,
                                         double wall_seconds,
                                         const std::string& failure = "") {
  cert_header(os, "verify-connection", cfg);
  os << "map: " << cert.map_description << "\n";
  os << "period: " << cert.period << "\n\n";

  cert_check(os, "attractor-inclusion-and-contraction", true,
             cert.attractor_verified,
             cert.attractor_verified
                 ? "lambda = " + dec_double(prob.attractor.lambda)
                 : "");
  cert_check(os, "saddle-cone-invariance", cert.attractor_verified,
             cert.cone_verified);
  cert_check(os, "saddle-expansion", cert.cone_verified,
             cert.expansion_verified,
             cert.expansion_verified
                 ? "m = " + dec_double(prob.saddle.m) + ", margin " +
                       dec_double(prob.saddle.expansion_margin)
                 : "");
  cert_check(os, "fiber-image-in-I", cert.expansion_verified, cert.fiber_ok,
             cert.fiber_ok ? "image u " + cert_interval(cert.fiber_image_u)
                           : "");
  cert_check(os, "fundamental-domain-propagation", cert.fiber_ok,
             cert.propagation_ok,
             cert.propagation_ok
                 ? std::to_string(cert.fragments_used) + " fragments, " +
                       std::to_string(prob.iterates) + " iterates"
                 : "");
  cert_check(os, "orbit-closure-bookkeeping", cert.propagation_ok,
             cert.orbit_closure_recorded);

  os << "\n[values]\n";
  os << "attractor-box-u = " << cert_interval(prob.attractor.box[0]) << "\n";
  os << "attractor-box-s = " << cert_interval(prob.attractor.box[1]) << "\n";
  os << "attractor-lambda = " << dec_double(prob.attractor.lambda) << "\n";
  os << "attractor-jacobian:\n" << cert_matrix(prob.attractor.jacobian);
  os << "saddle-box-u = " << cert_interval(prob.saddle.box[0]) << "\n";
  os << "saddle-box-s = " << cert_interval(prob.saddle.box[1]) << "\n";
  os << "saddle-L = " << dec_double(prob.saddle.L) << "\n";
  os << "saddle-m = " << dec_double(prob.saddle.m) << "\n";
  os << "saddle-jacobian:\n" << cert_matrix(prob.saddle.jacobian);
  os << "x-bar = " << hex_double(prob.x_bar) << " ~ " << dec_double(prob.x_bar)
     << "\n";
  os << "I = " << cert_interval(prob.I) << "\n";
  if (!prob.attractor_orbit.empty()) {
    os << "attractor-orbit:\n";
    for (std::size_t i = 0; i < prob.attractor_orbit.size(); ++i)
      os << "  point " << i << ": ("
         << cert_interval(prob.attractor_orbit[i][0]) << ", "
         << cert_interval(prob.attractor_orbit[i][1]) << ")\n";
  }
  if (!prob.saddle_orbit.empty()) {
    os << "saddle-orbit:\n";
    for (std::size_t i = 0; i < prob.saddle_orbit.size(); ++i)
      os << "  point " << i << ": (" << cert_interval(prob.saddle_orbit[i][0])
         << ", " << cert_interval(prob.saddle_orbit[i][1]) << ")\n";
  }
  os << "[/values]\n\n";

  os << "claims:";
  if (cert.heteroclinic_orbit) os << " HeteroclinicOrbit";
  if (cert.invariant_connecting_curve) os << " InvariantConnectingCurve";
  if (cert.resonant_torus) os << " ResonantTorus";
  if (!cert.heteroclinic_orbit && !cert.invariant_connecting_curve &&
      !cert.resonant_torus)
    os << " none";
  os << "\n";
  if (failure.empty() && cert.resonant_torus) {
    os << "conclusion: ResonantTorus\n";
    os << "status: verified\n";
  } else if (failure.empty() && cert.invariant_connecting_curve) {
    os << "conclusion: InvariantConnectingCurve\n";
    os << "status: verified\n";
  } else if (failure.empty() && cert.heteroclinic_orbit) {
    os << "conclusion: HeteroclinicOrbit\n";
    os << "status: verified\n";
  } else {
    os << "failure: " << failure << "\n";
    os << "status: failed\n";
  }
  os << "wall-seconds: " << dec_double(wall_seconds) << "\n";
}

inline void write_periodic_certificate(
    std::ostream& os, const std::vector<std::vector<Interval>>& orbits,
    const std::vector<std::string>& names, const std::vector<bool>& unique,
    const Config& cfg, double wall_seconds, const std::string& failure = "") {
  cert_header(os, "find-periodic", cfg);
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    os << "orbit " << names[o] << ": "
       << (unique[o] ? "unique (interval Newton contraction)"
                     : "NOT certified unique")
       << "\n";
    const auto& st = orbits[o];
    for (std::size_t i = 0; i + 1 < st.size(); i += 2) {
      os << "  point " << i / 2 << ": mid (" << dec_double(st[i].mid()) << ", "
         << dec_double(st[i + 1].mid()) << ")  rad ("
         << dec_double(st[i].rad()) << ", " << dec_double(st[i + 1].rad())
         << ")\n";
      os << "    x = " << cert_interval(st[i]) << "\n";
      os << "    y = " << cert_interval(st[i + 1]) << "\n";
    }
  }
  if (failure.empty()) {
    os << "status: verified\n";
  } else {
    os << "failure: " << failure << "\n";
    os << "status: failed\n";
  }
  os << "wall-seconds: " << dec_double(wall_seconds) << "\n";
}

}  // namespace veritor
