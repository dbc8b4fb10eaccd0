#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pcm/corpus.hpp"

namespace pcm {

// Streaming line source over a possibly-compressed file. gzip and zstd are
// autodetected by magic bytes; anything else is read as plain text. Lines
// are split on '\n' with a trailing '\r' stripped; a final unterminated
// line is still delivered.
class LineSource {
 public:
  virtual ~LineSource() = default;
  virtual bool next(std::string& line) = 0;
};

std::unique_ptr<LineSource> open_line_source(const std::string& path);

// invoke fn once per nonempty line
void for_each_line(const std::string& path, const std::function<void(const std::string&)>& fn);

std::vector<Post> read_posts_jsonl(const std::string& path);
std::vector<Comment> read_comments_jsonl(const std::string& path);

}  // namespace pcm
