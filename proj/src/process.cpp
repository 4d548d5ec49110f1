#include "chcta/process.hpp"

#include "chcta/errors.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace chcta {

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> words;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (std::size_t i = 0; i < command.size(); ++i) {
    char c = command[i];
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else if (c == '\\' && quote == '"' && i + 1 < command.size()) {
        cur += command[++i];
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == '\\' && i + 1 < command.size()) {
      cur += command[++i];
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) words.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (quote) throw BackendError("unterminated quote in solver command: " + std::string(command));
  if (in_word) words.push_back(std::move(cur));
  return words;
}

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw BackendError("empty solver command");
  std::signal(SIGPIPE, SIG_IGN);

  int in[2], out[2], status[2];
  if (::pipe2(in, O_CLOEXEC) != 0) throw BackendError("pipe: " + std::string(std::strerror(errno)));
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw BackendError("pipe: " + std::string(std::strerror(errno)));
  }
  if (::pipe2(status, O_CLOEXEC) != 0) {
    for (int fd : {in[0], in[1], out[0], out[1]}) ::close(fd);
    throw BackendError("pipe: " + std::string(std::strerror(errno)));
  }

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in[0], in[1], out[0], out[1], status[0], status[1]}) ::close(fd);
    throw BackendError("fork: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::execvp(args[0], args.data());
    int err = errno;
    [[maybe_unused]] auto n = ::write(status[1], &err, sizeof err);
    ::_exit(127);
  }

  ::close(in[0]);
  ::close(out[1]);
  ::close(status[1]);
  int err = 0;
  ssize_t n;
  do {
    n = ::read(status[0], &err, sizeof err);
  } while (n < 0 && errno == EINTR);
  ::close(status[0]);
  if (n == sizeof err) {
    ::close(in[1]);
    ::close(out[0]);
    ::waitpid(pid, nullptr, 0);
    throw BackendError("cannot start solver '" + argv[0] + "': " + std::strerror(err));
  }
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
}

Subprocess::~Subprocess() { kill(); }

void Subprocess::write(std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::write(to_child_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BackendError("cannot write to solver: " + std::string(std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

Subprocess::ReadStatus Subprocess::read_some(std::string& out, Clock::time_point deadline) {
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) return ReadStatus::Timeout;
    pollfd p{from_child_, POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000 * 60)));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw BackendError("poll: " + std::string(std::strerror(errno)));
    }
    if (r == 0) continue;
    char buf[8192];
    ssize_t n = ::read(from_child_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw BackendError("cannot read from solver: " + std::string(std::strerror(errno)));
    }
    if (n == 0) return ReadStatus::Eof;
    out.append(buf, static_cast<std::size_t>(n));
    return ReadStatus::Data;
  }
}

void Subprocess::kill() {
  close_fd(to_child_);
  close_fd(from_child_);
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

}  // namespace chcta
