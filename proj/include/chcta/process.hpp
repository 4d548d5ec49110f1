#ifndef CHCTA_PROCESS_HPP
#define CHCTA_PROCESS_HPP

#include <chrono>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace chcta {

/// Splits a command line into words. Single and double quotes group words;
/// a backslash escapes the next character outside single quotes.
std::vector<std::string> split_command(std::string_view command);

/// Child process connected through pipes to its standard input and output.
/// Standard error is discarded. The child is killed on destruction.
class Subprocess {
 public:
  enum class ReadStatus { Data, Eof, Timeout };
  using Clock = std::chrono::steady_clock;

  /// Throws BackendError when the program cannot be started.
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  /// Throws BackendError when the child has closed its input.
  void write(std::string_view data);
  /// Appends whatever output arrives before `deadline`.
  ReadStatus read_some(std::string& out, Clock::time_point deadline);
  void kill();
  bool running() const { return pid_ > 0; }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

}  // namespace chcta

#endif  // CHCTA_PROCESS_HPP
