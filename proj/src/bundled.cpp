#include "psr/io.hpp"

namespace psr {

namespace {

const char* const kCarComponents[] = {
    "base",           "front chassis",          "front chassis pin",     "rear chassis",
    "short-rear chassis", "front-rear chassis pin", "rear-rear chassis pin", "front bracket",
    "front bracket screw", "front wheel assy",     "rear wheel assy",
};

constexpr std::size_t kCarSize = std::size(kCarComponents);

ProcedureSpec car_skeleton(std::string id, std::initializer_list<int> initial) {
  ProcedureSpec spec;
  spec.id = std::move(id);
  for (std::size_t i = 0; i < kCarSize; ++i) spec.components.push_back({i, kCarComponents[i]});
  spec.initial_state = AssemblyState(initial);
  return spec;
}

void add(ProcedureSpec& spec, std::string id, std::size_t component, Transition t,
         std::vector<std::string> prerequisites) {
  std::string description = std::string(t == Transition::Install ? "install " : "remove ") + kCarComponents[component];
  spec.actions.push_back({std::move(id), component, t, std::move(prerequisites), std::move(description)});
}

ProcedureSpec car_assembly() {
  auto spec = car_skeleton("industreal_car_assembly", {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const auto I = Transition::Install;
  add(spec, "a0", 0, I, {});
  add(spec, "a1", 1, I, {"a0"});
  add(spec, "a2", 2, I, {"a1"});
  add(spec, "a3", 3, I, {"a0"});
  add(spec, "a4", 5, I, {"a1", "a3"});
  add(spec, "a5", 6, I, {"a3"});
  add(spec, "a6", 7, I, {"a1"});
  add(spec, "a7", 8, I, {"a6"});
  add(spec, "a8", 9, I, {"a2"});
  add(spec, "a9", 10, I, {"a5"});
  return spec;
}

// Swaps the rear chassis for the short-rear chassis on a finished car.
ProcedureSpec car_maintenance() {
  auto spec = car_skeleton("industreal_car_maintenance", {1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1});
  const auto I = Transition::Install;
  const auto R = Transition::Remove;
  add(spec, "m0", 5, R, {});
  add(spec, "m1", 6, R, {});
  add(spec, "m2", 3, R, {"m0", "m1"});
  add(spec, "m3", 4, I, {"m2"});
  add(spec, "m4", 5, I, {"m3"});
  add(spec, "m5", 6, I, {"m3"});
  return spec;
}

}  // namespace

ProcedureSpec bundled_procedure(std::string_view id) {
  if (id == "industreal_car_assembly") return car_assembly();
  if (id == "industreal_car_maintenance") return car_maintenance();
  throw Error("unknown bundled procedure '" + std::string(id) + "'");
}

std::vector<std::string> bundled_procedure_ids() {
  return {"industreal_car_assembly", "industreal_car_maintenance"};
}

}  // namespace psr
