#include "smc/runtime.hpp"

namespace smc {

const char* stability_name(StabilityClass c) {
  switch (c) {
    case StabilityClass::DetInDetOut: return "DetInDetOut";
    case StabilityClass::DetInNonDetOut: return "DetInNonDetOut";
    case StabilityClass::NonDetInDetOut: return "NonDetInDetOut";
    case StabilityClass::NonDetInNonDetOut: return "NonDetInNonDetOut";
  }
  return "?";
}

bool deterministic_output(StabilityClass c) {
  return c == StabilityClass::DetInDetOut || c == StabilityClass::NonDetInDetOut;
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Success: return "Success";
    case RunStatus::Timeout: return "Timeout";
    case RunStatus::Mismatch: return "Mismatch";
    case RunStatus::Unsupported: return "Unsupported";
  }
  return "?";
}

AcceptDecision accept_policy(StabilityClass cls, std::span<const Bytes> answers) {
  if (cls == StabilityClass::NonDetInDetOut) return Unsupported{};
  if (answers.empty()) return Mismatch{};
  if (cls == StabilityClass::DetInDetOut) {
    for (const Bytes& a : answers) {
      if (a != answers.front()) return Mismatch{};
    }
  }
  return Accepted{answers.front()};
}

}  // namespace smc
