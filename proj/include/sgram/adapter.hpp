#pragma once

// Line protocol to an external seq2seq model running as a child process.
//
// Request: the linearized AMR text on one line. Response: one line in the
// scene-graph target grammar. The child is started lazily through
// "/bin/sh -c <command>" and kept alive across requests.

#include <chrono>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "sgram/error.hpp"
#include "sgram/linearize.hpp"
#include "sgram/scene_graph.hpp"

namespace sgram::amr2sg {

// Adapter failures keep whatever the child printed.
class AdapterError : public Error {
 public:
  AdapterError(ErrorCode code, const std::string& message,
               std::string raw_response)
      : Error(code, message), raw_response_(std::move(raw_response)) {}

  const std::string& raw_response() const { return raw_response_; }

 private:
  std::string raw_response_;
};

// One child process per instance; not safe for concurrent callers.
class ExternalAdapter {
 public:
  // Throws ErrorCode::kInvalidArgument for an empty command or a
  // non-positive timeout.
  ExternalAdapter(std::string command, std::chrono::milliseconds timeout);
  ~ExternalAdapter();

  ExternalAdapter(const ExternalAdapter&) = delete;
  ExternalAdapter& operator=(const ExternalAdapter&) = delete;

  // Raw round trip. Throws AdapterError (kAdapterTimeout, kAdapterCrashed).
  std::string request(std::string_view line);

  // request() followed by parse_sg_text(). Unparseable responses raise
  // AdapterError with kMalformedModelOutput.
  sg::SceneGraph convert(const linearize::Sequence& seq);
  sg::SceneGraph convert_text(std::string_view linearized);

  const std::string& command() const { return command_; }
  std::chrono::milliseconds timeout() const { return timeout_; }
  const std::string& last_response() const { return last_response_; }

  // Kills the child if running. The next request starts a fresh one.
  void stop();

 private:
  void start();
  int reap(bool wait);

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string last_response_;
};

}  // namespace sgram::amr2sg
