// Copyright 2026 The bifscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bif/model_file.hpp"

#include "bif/error.hpp"
#include "bif/toml_lite.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace bif {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InvalidArgumentError(where + ": " + what);
}

void check_keys(const json& table, const std::string& where, const std::set<std::string>& allowed) {
  if (!table.is_object()) bad(where, "expected a table");
  for (const auto& [key, value] : table.items()) {
    if (!allowed.count(key)) bad(where, "unknown key '" + key + "'");
  }
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) bad(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where, "expected a finite number");
  return d;
}

double number_or(const json& t, const std::string& key, double fallback, const std::string& where) {
  return t.contains(key) ? get_number(t.at(key), where + "." + key) : fallback;
}

std::uint64_t get_count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(where, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) bad(where, "expected a string");
  return v.get<std::string>();
}

const json& require(const json& t, const std::string& key, const std::string& where) {
  if (!t.contains(key)) bad(where, "missing key '" + key + "'");
  return t.at(key);
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_number(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// A number, an array of numbers, or {start, stop, num} (inclusive, evenly spaced).
std::vector<double> parse_grid(const json& v, const std::string& where) {
  if (v.is_number()) return {get_number(v, where)};
  if (v.is_array()) {
    std::vector<double> out = number_list(v, where);
    if (out.empty()) bad(where, "grid is empty");
    return out;
  }
  check_keys(v, where, {"start", "stop", "num"});
  const double start = get_number(require(v, "start", where), where + ".start");
  const double stop = get_number(require(v, "stop", where), where + ".stop");
  const std::uint64_t num = get_count(require(v, "num", where), where + ".num");
  if (num == 0) bad(where + ".num", "must be >= 1");
  if (num == 1) return {start};
  std::vector<double> out(num);
  for (std::uint64_t k = 0; k < num; ++k) {
    out[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(num - 1);
  }
  out.back() = stop;
  return out;
}

std::vector<double> parse_time_grid(const json& v, const std::string& where) {
  std::vector<double> g = parse_grid(v, where);
  for (double t : g) {
    if (t < 0.0) bad(where, "times must be >= 0");
  }
  return g;
}

Complex parse_entry(const json& v, const std::string& where) {
  if (v.is_number()) return {get_number(v, where), 0.0};
  if (v.is_array() && v.size() == 2) return {get_number(v[0], where), get_number(v[1], where)};
  bad(where, "matrix entries must be numbers or [re, im] pairs");
}

bool is_term_list(const json& v) { return v.is_array() && !v.empty() && v[0].is_object(); }

// Full matrix or a list of {coef, system, env} tensor-product terms.
CMatrix parse_bipartite_operator(const json& v, std::size_t d_s, std::size_t d_e,
                                 const std::string& where) {
  if (v.is_object()) return parse_bipartite_operator(json::array({v}), d_s, d_e, where);
  if (!is_term_list(v)) return parse_matrix(v, where);
  const auto n = static_cast<Eigen::Index>(d_s * d_e);
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string w = where + "[" + std::to_string(k) + "]";
    check_keys(v[k], w, {"coef", "system", "env"});
    const Complex coef = v[k].contains("coef") ? parse_entry(v[k].at("coef"), w + ".coef") : 1.0;
    const CMatrix s = parse_matrix(require(v[k], "system", w), w + ".system");
    const CMatrix e = parse_matrix(require(v[k], "env", w), w + ".env");
    if (static_cast<std::size_t>(s.rows()) != d_s || static_cast<std::size_t>(e.rows()) != d_e) {
      bad(w, "term dimensions do not match the system / environment");
    }
    out += coef * tensor(s, e);
  }
  return out;
}

DirectionSpec parse_direction(const json& v, const std::string& where) {
  DirectionSpec d;
  if (v.is_object()) {
    check_keys(v, where, {"theta", "phi"});
    d.kind = DirectionSpec::Kind::Explicit;
    d.explicit_dir.theta = get_number(require(v, "theta", where), where + ".theta");
    d.explicit_dir.phi = number_or(v, "phi", 0.0, where);
    d.explicit_dir.validate();
    return d;
  }
  const std::string s = get_string(v, where);
  if (s == "x") d.kind = DirectionSpec::Kind::X;
  else if (s == "y") d.kind = DirectionSpec::Kind::Y;
  else if (s == "z") d.kind = DirectionSpec::Kind::Z;
  else if (s == "n") d.kind = DirectionSpec::Kind::N;
  else if (s == "basis") d.kind = DirectionSpec::Kind::Basis;
  else bad(where, "unknown direction '" + s + "'");
  return d;
}

StateSpec parse_state(const json& v, const std::string& where) {
  StateSpec st;
  if (v.is_string()) {
    static const std::set<std::string> labels{"+x", "-x", "+y", "-y", "+z", "-z",
                                              "+n", "-n", "mixed"};
    st.label = v.get<std::string>();
    if (!labels.count(st.label) && st.label.rfind("basis:", 0) != 0) {
      bad(where, "unknown state label '" + st.label + "'");
    }
    return st;
  }
  st.kind = StateSpec::Kind::Matrix;
  st.matrix = parse_matrix(v, where);
  const std::string err = density_matrix_violation(st.matrix);
  if (!err.empty()) bad(where, err);
  return st;
}

std::vector<std::string> split_axes(const std::string& s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

std::shared_ptr<const TwoTimePropagator> parse_member_channel(const json& m, const std::string& w) {
  const std::string type = get_string(require(m, "type", w), w + ".type");
  if (type == "pauli") {
    check_keys(m, w, {"weight", "type", "axis", "rate"});
    const std::string axis = get_string(require(m, "axis", w), w + ".axis");
    PauliChannel ch;
    if (axis == "x") ch.axis = PauliAxis::X;
    else if (axis == "y") ch.axis = PauliAxis::Y;
    else if (axis == "z") ch.axis = PauliAxis::Z;
    else bad(w + ".axis", "expected x, y or z");
    ch.rate = get_number(require(m, "rate", w), w + ".rate");
    if (ch.rate < 0.0) bad(w + ".rate", "must be >= 0");
    return std::make_shared<PauliPropagator>(ch);
  }
  if (type == "unitary") {
    check_keys(m, w, {"weight", "type", "hamiltonian"});
    CMatrix h = parse_matrix(require(m, "hamiltonian", w), w + ".hamiltonian");
    if (!is_hermitian(h)) throw NotHermitianError(w + ".hamiltonian: not Hermitian");
    return std::make_shared<UnitaryPropagator>(std::move(h));
  }
  if (type == "lindblad") {
    check_keys(m, w, {"weight", "type", "hamiltonian", "jumps"});
    CMatrix h = parse_matrix(require(m, "hamiltonian", w), w + ".hamiltonian");
    if (!is_hermitian(h)) throw NotHermitianError(w + ".hamiltonian: not Hermitian");
    std::vector<CMatrix> jumps;
    if (m.contains("jumps")) {
      const json& js = m.at("jumps");
      if (!js.is_array()) bad(w + ".jumps", "expected an array of matrices");
      for (std::size_t k = 0; k < js.size(); ++k) {
        jumps.push_back(parse_matrix(js[k], w + ".jumps[" + std::to_string(k) + "]"));
      }
    }
    return std::make_shared<LindbladPropagator>(lindblad_generator(h, jumps));
  }
  bad(w + ".type", "expected pauli, unitary or lindblad");
}

NoiseEnsemble parse_noise_ensemble(const json& t) {
  const std::string w = "noise_ensemble";
  check_keys(t, w, {"pauli_rate", "pauli_weights", "members"});
  const bool pauli = t.contains("pauli_rate") || t.contains("pauli_weights");
  if (pauli == t.contains("members")) bad(w, "give either pauli_rate/pauli_weights or members");
  if (pauli) {
    const double rate = get_number(require(t, "pauli_rate", w), w + ".pauli_rate");
    const std::vector<double> q = number_list(require(t, "pauli_weights", w), w + ".pauli_weights");
    if (q.size() != 3) bad(w + ".pauli_weights", "expected 3 weights (x, y, z)");
    if (rate < 0.0) bad(w + ".pauli_rate", "must be >= 0");
    return NoiseEnsemble::pauli_mixture(rate, {q[0], q[1], q[2]});
  }
  const json& members = t.at("members");
  if (!members.is_array() || members.empty()) bad(w + ".members", "expected a non-empty array of tables");
  std::vector<double> weights;
  std::vector<std::shared_ptr<const TwoTimePropagator>> channels;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const std::string mw = w + ".members[" + std::to_string(k) + "]";
    if (!members[k].is_object()) bad(mw, "expected a table");
    weights.push_back(get_number(require(members[k], "weight", mw), mw + ".weight"));
    channels.push_back(parse_member_channel(members[k], mw));
  }
  return NoiseEnsemble(std::move(weights), std::move(channels));
}

DensityMatrix parse_env_state(const json& t, const std::string& w) {
  CMatrix s = parse_matrix(require(t, "sigma0", w), w + ".sigma0");
  const std::string err = density_matrix_violation(s);
  if (!err.empty()) bad(w + ".sigma0", err);
  return DensityMatrix(s);
}

BipartiteModel parse_bipartite(const json& t) {
  const std::string w = "bipartite";
  const std::string type = get_string(require(t, "type", w), w + ".type");
  if (type == "unitary") {
    check_keys(t, w, {"type", "h_s", "h_e", "h_i", "sigma0"});
    CMatrix h_s = parse_matrix(require(t, "h_s", w), w + ".h_s");
    CMatrix h_e = parse_matrix(require(t, "h_e", w), w + ".h_e");
    const CMatrix h_i = parse_bipartite_operator(require(t, "h_i", w), h_s.rows(), h_e.rows(), w + ".h_i");
    return BipartiteModel::unitary(std::move(h_s), std::move(h_e), h_i, parse_env_state(t, w));
  }
  if (type == "classical_rate") {
    check_keys(t, w, {"type", "conditioned_hamiltonians", "rates", "sigma0"});
    const json& hs = require(t, "conditioned_hamiltonians", w);
    if (!hs.is_array() || hs.empty()) bad(w + ".conditioned_hamiltonians", "expected an array of matrices");
    std::vector<CMatrix> conditioned;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      conditioned.push_back(parse_matrix(hs[k], w + ".conditioned_hamiltonians[" + std::to_string(k) + "]"));
    }
    const CMatrix r = parse_matrix(require(t, "rates", w), w + ".rates");
    if (r.imag().cwiseAbs().maxCoeff() != 0.0) bad(w + ".rates", "rates must be real");
    return classical_rate_model(conditioned, r.real(), parse_env_state(t, w));
  }
  if (type == "lindblad") {
    check_keys(t, w, {"type", "system_dim", "env_dim", "hamiltonian", "jumps", "sigma0"});
    const auto d_s = static_cast<std::size_t>(get_count(require(t, "system_dim", w), w + ".system_dim"));
    const auto d_e = static_cast<std::size_t>(get_count(require(t, "env_dim", w), w + ".env_dim"));
    if (d_s == 0 || d_e == 0) bad(w, "dimensions must be >= 1");
    const CMatrix h = parse_bipartite_operator(require(t, "hamiltonian", w), d_s, d_e, w + ".hamiltonian");
    if (!is_hermitian(h)) throw NotHermitianError(w + ".hamiltonian: not Hermitian");
    std::vector<CMatrix> jumps;
    if (t.contains("jumps")) {
      const json& js = t.at("jumps");
      if (!js.is_array()) bad(w + ".jumps", "expected an array");
      for (std::size_t k = 0; k < js.size(); ++k) {
        jumps.push_back(parse_bipartite_operator(js[k], d_s, d_e, w + ".jumps[" + std::to_string(k) + "]"));
      }
    }
    return BipartiteModel::lindblad(lindblad_generator(h, jumps), d_s, parse_env_state(t, w));
  }
  bad(w + ".type", "expected unitary, classical_rate or lindblad");
}

SchemeSpec parse_scheme(const json& t, bool exact) {
  const std::string w = "scheme";
  std::set<std::string> allowed{"t", "tau", "equal_times", "theta"};
  if (exact) allowed.insert({"rho0", "directions", "renewed_states", "update_probability"});
  check_keys(t, w, allowed);
  SchemeSpec s;
  s.t = parse_time_grid(require(t, "t", w), w + ".t");
  if (t.contains("equal_times")) {
    if (!t.at("equal_times").is_boolean()) bad(w + ".equal_times", "expected true or false");
    s.equal_times = t.at("equal_times").get<bool>();
  }
  if (s.equal_times) {
    if (t.contains("tau")) bad(w, "tau must be omitted when equal_times = true");
  } else {
    s.tau = parse_time_grid(require(t, "tau", w), w + ".tau");
  }
  if (t.contains("theta")) {
    s.theta = parse_grid(t.at("theta"), w + ".theta");
    for (double th : s.theta) BlochDirection{th, 0.0}.validate();
  }
  if (!exact) return s;

  s.rho0 = parse_state(require(t, "rho0", w), w + ".rho0");
  if (t.contains("directions")) {
    s.default_sweep = false;
    const json& d = t.at("directions");
    // One triple ["x", "n", "x"] or a list of triples.
    auto parse_triple = [&](const json& v, const std::string& where) {
      if (v.is_string() && v.get<std::string>().size() == 3) {
        const auto axes = split_axes(v.get<std::string>());
        return DirectionTriple{parse_direction(axes[0], where), parse_direction(axes[1], where),
                               parse_direction(axes[2], where)};
      }
      if (!v.is_array() || v.size() != 3) bad(where, "expected three directions (x, y, z measurements)");
      return DirectionTriple{parse_direction(v[0], where + "[0]"), parse_direction(v[1], where + "[1]"),
                             parse_direction(v[2], where + "[2]")};
    };
    const bool nested = d.is_array() && !d.empty() && (d[0].is_array() || (d[0].is_string() && d[0].get<std::string>().size() == 3));
    if (nested) {
      for (std::size_t k = 0; k < d.size(); ++k) {
        s.directions.push_back(parse_triple(d[k], w + ".directions[" + std::to_string(k) + "]"));
      }
    } else {
      s.directions.push_back(parse_triple(d, w + ".directions"));
    }
  }
  if (t.contains("renewed_states")) {
    const json& rs = t.at("renewed_states");
    if (!rs.is_array() || rs.empty()) bad(w + ".renewed_states", "expected a non-empty array");
    for (std::size_t k = 0; k < rs.size(); ++k) {
      s.renewed_states.push_back(parse_state(rs[k], w + ".renewed_states[" + std::to_string(k) + "]"));
    }
  }
  if (t.contains("update_probability")) {
    const json& up = t.at("update_probability");
    if (!up.is_array() || up.empty()) bad(w + ".update_probability", "expected an array of rows");
    for (std::size_t k = 0; k < up.size(); ++k) {
      s.update_prob.push_back(number_list(up[k], w + ".update_probability[" + std::to_string(k) + "]"));
    }
  }
  return s;
}

McSpec parse_mc(const json& t) {
  const std::string w = "mc";
  check_keys(t, w, {"n_samples", "seed", "workers", "replicas"});
  McSpec mc;
  mc.n_samples = get_count(require(t, "n_samples", w), w + ".n_samples");
  if (mc.n_samples == 0) bad(w + ".n_samples", "must be >= 1");
  mc.seed = get_count(require(t, "seed", w), w + ".seed");
  if (t.contains("workers")) mc.workers = static_cast<unsigned>(get_count(t.at("workers"), w + ".workers"));
  if (t.contains("replicas")) mc.replicas = get_count(t.at("replicas"), w + ".replicas");
  if (mc.replicas < 2) bad(w + ".replicas", "must be >= 2");
  if (mc.n_samples < mc.replicas) bad(w + ".n_samples", "must be >= replicas");
  return mc;
}

}  // namespace

CMatrix parse_matrix(const json& v, const std::string& where) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "i") return pauli::identity();
    if (s == "x") return pauli::x();
    if (s == "y") return pauli::y();
    if (s == "z") return pauli::z();
    if (s == "raising") return pauli::raising();
    if (s == "lowering") return pauli::lowering();
    bad(where, "unknown matrix name '" + s + "'");
  }
  if (!v.is_array() || v.empty()) bad(where, "expected a matrix (array of rows) or a name");
  const auto rows = static_cast<Eigen::Index>(v.size());
  CMatrix m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      bad(where, "matrix must be square");
    }
    for (Eigen::Index j = 0; j < rows; ++j) {
      m(i, j) = parse_entry(row[static_cast<std::size_t>(j)], where);
    }
  }
  return m;
}

std::string DirectionSpec::label() const {
  switch (kind) {
    case Kind::X: return "x";
    case Kind::Y: return "y";
    case Kind::Z: return "z";
    case Kind::N: return "n";
    case Kind::Basis: return "basis";
    case Kind::Explicit: {
      std::ostringstream os;
      os.precision(6);
      os << "t" << explicit_dir.theta << "p" << explicit_dir.phi;
      return os.str();
    }
  }
  return "?";
}

MeasurementSet DirectionSpec::resolve(std::size_t d, double theta) const {
  if (kind == Kind::Basis) return basis_projectors(d);
  if (d != 2) throw DimensionError("Bloch directions need a qubit system; use \"basis\"");
  switch (kind) {
    case Kind::X: return bloch_projectors(BlochDirection::x());
    case Kind::Y: return bloch_projectors(BlochDirection::y());
    case Kind::Z: return bloch_projectors(BlochDirection::z());
    case Kind::N: return bloch_projectors(BlochDirection{theta, 0.0});
    default: return bloch_projectors(explicit_dir);
  }
}

CMatrix StateSpec::resolve(std::size_t d, double theta) const {
  if (kind == Kind::Matrix) {
    if (static_cast<std::size_t>(matrix.rows()) != d) throw DimensionError("state dimension mismatch");
    return matrix;
  }
  if (label == "mixed") return CMatrix::Identity(d, d) / static_cast<double>(d);
  if (label.rfind("basis:", 0) == 0) {
    const std::size_t k = std::stoul(label.substr(6));
    if (k >= d) throw DimensionError("basis state index out of range");
    CMatrix m = CMatrix::Zero(d, d);
    m(k, k) = 1.0;
    return m;
  }
  if (d != 2) throw DimensionError("Bloch state labels need a qubit system");
  BlochDirection dir;
  switch (label[1]) {
    case 'x': dir = BlochDirection::x(); break;
    case 'y': dir = BlochDirection::y(); break;
    case 'z': dir = BlochDirection::z(); break;
    default: dir = BlochDirection{theta, 0.0}; break;
  }
  const MeasurementSet m = bloch_projectors(dir);
  return m.op(label[0] == '+' ? 0 : 1);
}

std::vector<std::pair<double, double>> SchemeSpec::time_points() const {
  std::vector<std::pair<double, double>> out;
  for (double a : t) {
    if (equal_times) {
      out.emplace_back(a, a);
    } else {
      for (double b : tau) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<DirectionTriple> SchemeSpec::direction_list(std::size_t d) const {
  if (!default_sweep) return directions;
  std::vector<DirectionTriple> out;
  if (d != 2) {
    DirectionSpec b;
    b.kind = DirectionSpec::Kind::Basis;
    out.push_back({b, b, b});
    return out;
  }
  const DirectionSpec::Kind axes[] = {DirectionSpec::Kind::X, DirectionSpec::Kind::Y,
                                      DirectionSpec::Kind::Z};
  for (auto a : axes) {
    for (auto b : axes) {
      for (auto c : axes) {
        DirectionTriple tr;
        tr[0].kind = a;
        tr[1].kind = b;
        tr[2].kind = c;
        out.push_back(tr);
      }
    }
  }
  return out;
}

SchemeConfig SchemeSpec::make(std::size_t d, const DirectionTriple& dirs, double t_, double tau_,
                              double theta_, UpdatePolicy::Kind kind) const {
  if (!rho0) throw InvalidArgumentError("scheme: rho0 is required");
  MeasurementSet mx = dirs[0].resolve(d, theta_);
  MeasurementSet my = dirs[1].resolve(d, theta_);
  MeasurementSet mz = dirs[2].resolve(d, theta_);
  UpdatePolicy policy = UpdatePolicy::deterministic();
  if (kind != UpdatePolicy::Kind::Deterministic) {
    std::vector<DensityMatrix> states;
    if (renewed_states.empty()) {
      for (std::size_t k = 0; k < my.size(); ++k) states.emplace_back(CMatrix(my.op(k)));
    } else {
      for (const StateSpec& s : renewed_states) states.emplace_back(s.resolve(d, theta_));
    }
    if (update_prob.empty()) {
      policy = UpdatePolicy::random_uniform(std::move(states), mx.size());
    } else {
      if (update_prob.size() != states.size()) {
        throw InvalidArgumentError("scheme.update_probability: one row per renewed state required");
      }
      policy = UpdatePolicy::random(std::move(states), update_prob);
    }
  }
  SchemeConfig cfg{.rho0 = DensityMatrix(rho0->resolve(d, theta_)),
                   .t = t_,
                   .tau = tau_,
                   .mx = std::move(mx),
                   .my = std::move(my),
                   .mz = std::move(mz),
                   .policy = std::move(policy)};
  cfg.validate();
  return cfg;
}

std::size_t ModelFile::system_dim() const {
  if (kind == Kind::NoiseEnsemble) return ensemble->dim();
  if (kind == Kind::Bipartite) return bipartite->system_dim();
  return 2;
}

ModelFile load_model(const json& doc) {
  if (!doc.is_object()) throw InvalidArgumentError("model file: expected a document of tables");
  check_keys(doc, "model file", {"noise_ensemble", "bipartite", "analytic", "scheme", "mc"});
  int declared = static_cast<int>(doc.contains("noise_ensemble")) +
                 static_cast<int>(doc.contains("bipartite"));
  if (doc.contains("analytic")) {
    const json& a = doc.at("analytic");
    check_keys(a, "analytic", {"eternal", "dissipative", "dephasing"});
    declared += static_cast<int>(a.size());
  }
  if (declared != 1) throw InvalidArgumentError("model file: declare exactly one model");

  ModelFile mf;
  if (doc.contains("noise_ensemble")) {
    mf.kind = ModelFile::Kind::NoiseEnsemble;
    mf.ensemble = parse_noise_ensemble(doc.at("noise_ensemble"));
  } else if (doc.contains("bipartite")) {
    mf.kind = ModelFile::Kind::Bipartite;
    mf.bipartite = parse_bipartite(doc.at("bipartite"));
  } else {
    const json& a = doc.at("analytic");
    if (a.contains("eternal")) {
      const std::string w = "analytic.eternal";
      const json& t = a.at("eternal");
      check_keys(t, w, {"gamma", "q", "mean_x"});
      mf.kind = ModelFile::Kind::Eternal;
      mf.eternal.gamma = number_or(t, "gamma", 1.0, w);
      if (t.contains("q")) {
        const std::vector<double> q = number_list(t.at("q"), w + ".q");
        if (q.size() != 3) bad(w + ".q", "expected 3 weights (x, y, z)");
        mf.eternal.q = {q[0], q[1], q[2]};
      }
      mf.eternal.validate();
      mf.eternal_mean_x = number_or(t, "mean_x", 0.0, w);
      if (std::abs(mf.eternal_mean_x) >= 1.0) bad(w + ".mean_x", "must satisfy |mean_x| < 1");
    } else if (a.contains("dissipative")) {
      const std::string w = "analytic.dissipative";
      const json& t = a.at("dissipative");
      check_keys(t, w, {"gamma", "tau_c", "grid_step", "directions"});
      mf.kind = ModelFile::Kind::Dissipative;
      mf.dissipative.gamma = number_or(t, "gamma", 1.0, w);
      mf.dissipative.tau_c = number_or(t, "tau_c", 5.0, w);
      mf.dissipative.grid_step = number_or(t, "grid_step", 1e-3, w);
      std::vector<std::string> dirs{"zzz", "xzx"};
      if (t.contains("directions")) {
        dirs.clear();
        const json& d = t.at("directions");
        if (!d.is_array() || d.empty()) bad(w + ".directions", "expected a non-empty array");
        for (const auto& e : d) dirs.push_back(get_string(e, w + ".directions"));
      }
      for (const auto& d : dirs) {
        if (d == "zzz") mf.dissipative_dirs.push_back(DissipativeDirections::ZZZ);
        else if (d == "xzx") mf.dissipative_dirs.push_back(DissipativeDirections::XZX);
        else bad(w + ".directions", "expected \"zzz\" or \"xzx\"");
      }
    } else {
      const std::string w = "analytic.dephasing";
      const json& t = a.at("dephasing");
      check_keys(t, w, {"omega_c", "lambda"});
      mf.kind = ModelFile::Kind::Dephasing;
      mf.dephasing.omega_c = number_or(t, "omega_c", 1.0, w);
      mf.dephasing.lam = number_or(t, "lambda", 1.0, w);
      mf.dephasing.validate();
    }
  }

  mf.scheme = parse_scheme(require(doc, "scheme", "model file"), mf.has_exact_engine());
  if (mf.kind == ModelFile::Kind::Dissipative) {
    double t_max = 0.0;
    for (const auto& [a, b] : mf.scheme.time_points()) t_max = std::max({t_max, a, b});
    mf.dissipative.t_max = std::max(t_max, mf.dissipative.grid_step);
    mf.dissipative.validate();
  }
  if (doc.contains("mc")) {
    if (!mf.has_exact_engine()) {
      throw InvalidArgumentError("mc: Monte Carlo needs a noise_ensemble or bipartite model");
    }
    mf.mc = parse_mc(doc.at("mc"));
  }
  if (mf.has_exact_engine()) {
    // Resolve one configuration early so shape errors surface at load time.
    const std::size_t d = mf.system_dim();
    const auto [t0, tau0] = mf.scheme.time_points().front();
    for (const DirectionTriple& dirs : mf.scheme.direction_list(d)) {
      (void)mf.scheme.make(d, dirs, t0, tau0, mf.scheme.theta.front(), UpdatePolicy::Kind::Random);
    }
  }
  return mf;
}

ModelFile load_model_file(const std::string& path) { return load_model(toml::parse_file(path)); }

}  // namespace bif
