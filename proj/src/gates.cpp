#include "ionqec/gates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ionqec/errors.hpp"

namespace ionqec {

Matrix2 pulse_matrix(double area, double phase) {
  // The generator squares to the identity, so the exponential is
  // cos(k/2) I - i sin(k/2) G.
  const double c = std::cos(area / 2);
  const double s = std::sin(area / 2);
  const Complex minus_i{0.0, -1.0};
  Matrix2 m;
  m(0, 0) = c;
  m(0, 1) = minus_i * s * std::polar(1.0, phase);
  m(1, 0) = minus_i * s * std::polar(1.0, -phase);
  m(1, 1) = c;
  return m;
}

StateVector apply_pulse(StateVector state, const PulseSpec& pulse) {
  return apply_single_ion(std::move(state), pulse.ion, pulse_matrix(pulse.area, pulse.phase));
}

StateVector apply_cnot(StateVector state, int control, int target) {
  state.check_ion(control);
  state.check_ion(target);
  if (control == target) {
    throw ValidationError("CNOT control and target are both ion " + std::to_string(control));
  }
  const std::uint64_t cmask = ion_mask(control);
  const std::uint64_t tmask = ion_mask(target);
  for (std::size_t k = 0; k < state.dim(); ++k) {
    if ((k & cmask) && !(k & tmask)) std::swap(state[k], state[k | tmask]);
  }
  return state;
}

StateVector apply_step(StateVector state, const CircuitStep& step) {
  return std::visit(
      [&](const auto& s) -> StateVector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PulseSpec>) {
          return apply_pulse(std::move(state), s);
        } else {
          return apply_cnot(std::move(state), s.control, s.target);
        }
      },
      step);
}

Circuit complement_circuit(std::span<const int> data_ions, int ancilla_x, int disentangle_control,
                           ControlPolarity polarity) {
  if (data_ions.empty()) throw ValidationError("complementing needs at least one data ion");
  if (std::find(data_ions.begin(), data_ions.end(), ancilla_x) != data_ions.end()) {
    throw ValidationError("ancilla " + std::to_string(ancilla_x) + " is also a data ion");
  }
  if (std::find(data_ions.begin(), data_ions.end(), disentangle_control) == data_ions.end()) {
    throw ValidationError("disentangling control " + std::to_string(disentangle_control) +
                          " is not a data ion");
  }
  Circuit steps;
  steps.reserve(data_ions.size() + 4);
  steps.emplace_back(half_pi_pulse(ancilla_x));
  for (int ion : data_ions) steps.emplace_back(CnotSpec{ancilla_x, ion});
  if (polarity == ControlPolarity::kOnZero) {
    steps.emplace_back(pi_pulse(disentangle_control));
    steps.emplace_back(CnotSpec{disentangle_control, ancilla_x});
    steps.emplace_back(PulseSpec{-kPi, -kPi / 2, disentangle_control});
  } else {
    steps.emplace_back(CnotSpec{disentangle_control, ancilla_x});
  }
  return steps;
}

StateVector complement_register(StateVector state, std::span<const int> data_ions, int ancilla_x,
                                int disentangle_control, ControlPolarity polarity) {
  state.check_ion(ancilla_x);
  if (state.excited_population(ancilla_x) > 1e-9) {
    throw ValidationError("complementing ancilla " + std::to_string(ancilla_x) + " is not in |0>");
  }
  const Circuit steps = complement_circuit(data_ions, ancilla_x, disentangle_control, polarity);
  validate_circuit(steps, state.n_ions());
  for (const auto& step : steps) state = apply_step(std::move(state), step);
  if (ancilla_one_population(state, ancilla_x) < 1.0 - 1e-9) {
    throw FeedbackError("ancilla " + std::to_string(ancilla_x) +
                        " did not disentangle after complementing (P(|1>) = " +
                        std::to_string(ancilla_one_population(state, ancilla_x)) + ")");
  }
  return state;
}

GateCount count_gates(std::span<const CircuitStep> steps) {
  GateCount count;
  for (const auto& step : steps) {
    if (const auto* p = std::get_if<PulseSpec>(&step)) {
      if (p->area != 0.0) ++count.rotations;
    } else {
      ++count.cnots;
    }
  }
  return count;
}

void validate_circuit(std::span<const CircuitStep> steps, int n_ions) {
  auto check = [&](int ion) {
    if (ion < 1 || ion > n_ions) {
      throw IndexError("circuit step addresses ion " + std::to_string(ion) + " of a " +
                       std::to_string(n_ions) + "-ion register");
    }
  };
  for (const auto& step : steps) {
    if (const auto* p = std::get_if<PulseSpec>(&step)) {
      check(p->ion);
      if (!std::isfinite(p->area) || !std::isfinite(p->phase)) {
        throw ValidationError("pulse area and phase must be finite");
      }
    } else {
      const auto& c = std::get<CnotSpec>(step);
      check(c.control);
      check(c.target);
      if (c.control == c.target) throw ValidationError("CNOT control equals target");
    }
  }
}

CircuitRun run_circuit(StateVector state, std::span<const CircuitStep> steps) {
  validate_circuit(steps, state.n_ions());
  for (const auto& step : steps) state = apply_step(std::move(state), step);
  return {std::move(state), count_gates(steps)};
}

Circuit inverse_circuit(std::span<const CircuitStep> steps) {
  Circuit out;
  out.reserve(steps.size());
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (const auto* p = std::get_if<PulseSpec>(&*it)) {
      out.emplace_back(PulseSpec{-p->area, p->phase, p->ion});
    } else {
      out.push_back(*it);
    }
  }
  return out;
}

nlohmann::json circuit_to_json(std::span<const CircuitStep> steps) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& step : steps) {
    if (const auto* p = std::get_if<PulseSpec>(&step)) {
      arr.push_back({{"pulse", {{"ion", p->ion}, {"k", p->area}, {"phi", p->phase}}}});
    } else {
      const auto& c = std::get<CnotSpec>(step);
      arr.push_back({{"cnot", {{"control", c.control}, {"target", c.target}}}});
    }
  }
  return arr;
}

Circuit circuit_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("circuit must be a JSON array of steps");
  Circuit steps;
  try {
    for (const auto& item : j) {
      if (item.contains("pulse")) {
        const auto& p = item.at("pulse");
        steps.emplace_back(PulseSpec{p.at("k").get<double>(), p.at("phi").get<double>(),
                                     p.at("ion").get<int>()});
      } else if (item.contains("cnot")) {
        const auto& c = item.at("cnot");
        steps.emplace_back(CnotSpec{c.at("control").get<int>(), c.at("target").get<int>()});
      } else {
        throw ValidationError("circuit step must be a pulse or a cnot: " + item.dump());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad circuit step: ") + e.what());
  }
  return steps;
}

nlohmann::json gate_count_to_json(const GateCount& c) {
  return {{"rotations", c.rotations}, {"cnots", c.cnots}};
}

}  // namespace ionqec
