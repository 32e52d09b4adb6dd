// Deterministic stand-in for an external seq2seq model. Reads one request
// per line on stdin and answers one line on stdout.
//
//   stub_model [--reply TEXT] [--sleep-ms N] [--exit-after N] [--concepts]
//
// --reply      answer TEXT to every request (default "( dog )")
// --sleep-ms   delay before each answer
// --exit-after exit with status 3 after N answers, before reading the next
// --concepts   answer "( c )" for every non-frame concept in a BFS/in-order
//              or DFS linearization

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <regex>
#include <set>
#include <string>
#include <thread>

namespace {

std::string concepts_reply(const std::string& line) {
  static const std::regex node(R"(\(\s*[a-z][a-zA-Z0-9]*\s*/\s*([^\s()]+))");
  static const std::regex frame(R"(-\d\d$)");
  std::set<std::string> seen;
  std::string out;
  for (std::sregex_iterator it(line.begin(), line.end(), node), end; it != end;
       ++it) {
    const std::string concept_label = (*it)[1];
    if (std::regex_search(concept_label, frame) || !seen.insert(concept_label).second) {
      continue;
    }
    if (!out.empty()) out += ' ';
    out += "( " + concept_label + " )";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string reply = "( dog )";
  long sleep_ms = 0;
  long exit_after = -1;
  bool concepts = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--reply" && i + 1 < argc) {
      reply = argv[++i];
    } else if (arg == "--sleep-ms" && i + 1 < argc) {
      sleep_ms = std::strtol(argv[++i], nullptr, 10);
    } else if (arg == "--exit-after" && i + 1 < argc) {
      exit_after = std::strtol(argv[++i], nullptr, 10);
    } else if (arg == "--concepts") {
      concepts = true;
    } else {
      std::cerr << "stub_model: unknown argument " << arg << '\n';
      return 64;
    }
  }

  long answered = 0;
  for (std::string line; std::getline(std::cin, line);) {
    if (exit_after >= 0 && answered >= exit_after) return 3;
    if (sleep_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    }
    std::cout << (concepts ? concepts_reply(line) : reply) << '\n' << std::flush;
    ++answered;
  }
  return 0;
}
