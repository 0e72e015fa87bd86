#include "subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "eqsat/errors.hpp"

namespace eqsat::detail {

CommandResult run_command(const std::string& command,
                          std::chrono::duration<double> timeout) {
  int fds[2];
  if (pipe(fds) != 0)
    throw Error(std::string("pipe: ") + std::strerror(errno));

  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw Error(std::string("fork: ") + std::strerror(errno));
  }

  if (pid == 0) {
    // Child: own process group so a timeout can kill the whole pipeline.
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close(fds[1]);
  CommandResult result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);

  char buf[4096];
  bool open = true;
  while (open) {
    auto remaining = deadline - std::chrono::steady_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count();
    if (ms <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(ms, 1000)));
    if (rc < 0) {
      if (errno == EINTR)
        continue;
      break;
    }
    if (rc == 0)
      continue;
    ssize_t got = read(fds[0], buf, sizeof buf);
    if (got > 0)
      result.output.append(buf, static_cast<std::size_t>(got));
    else
      open = false;
  }
  close(fds[0]);

  if (result.timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

} // namespace eqsat::detail
