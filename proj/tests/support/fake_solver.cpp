#include "fake_solver.hpp"

#include "corpus.hpp"

#include "chcta/errors.hpp"
#include "chcta/process.hpp"

namespace chcta::testing {

std::string real_solver_command() { return env_or("CHCTA_SOLVER", "z3 -in"); }

bool real_solver_available() {
  try {
    Subprocess p(split_command(real_solver_command()));
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string silent_solver() { return "sh -c 'cat >/dev/null'"; }

std::string garbage_solver() { return "sh -c 'while read l; do echo \")))\"; done'"; }

std::string nonsense_solver() {
  return "sh -c 'while read l; do case \"$l\" in *echo*) echo banana; "
         "echo \"$l\" | sed \"s/.*\\\"\\(.*\\)\\\".*/\\1/\";; esac; done'";
}

std::string dying_solver() { return "sh -c 'read l; exit 3'"; }

}  // namespace chcta::testing
