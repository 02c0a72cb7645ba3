#include "wec/cli/input.h"

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <streambuf>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "wec/util/error.h"
#include "wec/util/log.h"

extern char **environ;

namespace wec::cli {

namespace {

/// Reads the standard output of a child process.
class ChildOutputBuf : public std::streambuf {
public:
    ChildOutputBuf(const std::string &tool, const std::string &path) : tool_(tool) {
        int fds[2];
        if (::pipe(fds) != 0)
            throw Error(std::string("pipe failed: ") + std::strerror(errno));
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        posix_spawn_file_actions_addclose(&actions, fds[0]);
        posix_spawn_file_actions_addclose(&actions, fds[1]);
        std::string flag = "-dc";
        std::array<char *, 4> argv{const_cast<char *>(tool.c_str()), flag.data(), const_cast<char *>(path.c_str()),
                                   nullptr};
        const int rc = posix_spawnp(&pid_, tool.c_str(), &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        if (rc != 0) {
            ::close(fds[0]);
            throw InputError("cannot run " + tool + " to read " + path + ": " + std::strerror(rc));
        }
        fd_ = fds[0];
    }

    ~ChildOutputBuf() override {
        if (fd_ >= 0)
            ::close(fd_);
        int status = 0;
        if (pid_ > 0 && ::waitpid(pid_, &status, 0) == pid_ && !(WIFEXITED(status) && WEXITSTATUS(status) == 0))
            log::warn("decompressor_failed", {{"tool", tool_}, {"status", status}});
    }

protected:
    int_type underflow() override {
        if (gptr() < egptr())
            return traits_type::to_int_type(*gptr());
        ssize_t n;
        do {
            n = ::read(fd_, buffer_.data(), buffer_.size());
        } while (n < 0 && errno == EINTR);
        if (n <= 0)
            return traits_type::eof();
        setg(buffer_.data(), buffer_.data(), buffer_.data() + n);
        return traits_type::to_int_type(*gptr());
    }

private:
    std::string tool_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::array<char, 1 << 16> buffer_{};
};

class ChildStream : public std::istream {
public:
    ChildStream(const std::string &tool, const std::string &path) : std::istream(nullptr), buf_(tool, path) {
        rdbuf(&buf_);
    }

private:
    ChildOutputBuf buf_;
};

/// Borrows std::cin without owning it.
class StdinStream : public std::istream {
public:
    StdinStream() : std::istream(std::cin.rdbuf()) {}
};

} // namespace

std::optional<std::string> decompressor_for(const std::filesystem::path &path) {
    const auto ext = path.extension().string();
    if (ext == ".bz2")
        return "bzip2";
    if (ext == ".gz")
        return "gzip";
    if (ext == ".xz")
        return "xz";
    if (ext == ".zst")
        return "zstd";
    return std::nullopt;
}

std::unique_ptr<std::istream> open_input(const std::string &path) {
    if (path == "-")
        return std::make_unique<StdinStream>();
    if (!std::filesystem::is_regular_file(path))
        throw InputError("cannot open " + path);
    if (auto tool = decompressor_for(path))
        return std::make_unique<ChildStream>(*tool, path);
    auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*in)
        throw InputError("cannot open " + path);
    return in;
}

} // namespace wec::cli
