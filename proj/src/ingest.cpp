#include "pcm/ingest.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>

#include "pcm/errors.hpp"

#ifdef PCM_HAVE_ZSTD
// The runtime library is present without development headers, so the few
// stable streaming-API entry points used here are declared by hand.
extern "C" {
typedef struct ZSTD_DCtx_s ZSTD_DCtx;
typedef struct {
  const void* src;
  size_t size;
  size_t pos;
} ZSTD_inBuffer;
typedef struct {
  void* dst;
  size_t size;
  size_t pos;
} ZSTD_outBuffer;
ZSTD_DCtx* ZSTD_createDCtx(void);
size_t ZSTD_freeDCtx(ZSTD_DCtx*);
size_t ZSTD_decompressStream(ZSTD_DCtx*, ZSTD_outBuffer*, ZSTD_inBuffer*);
unsigned ZSTD_isError(size_t);
const char* ZSTD_getErrorName(size_t);
size_t ZSTD_DStreamInSize(void);
size_t ZSTD_DStreamOutSize(void);
}
#endif

namespace pcm {

namespace {

// shared line-splitting over a pull-based chunk reader
class ChunkLineSource : public LineSource {
 public:
  bool next(std::string& line) override {
    while (true) {
      size_t nl = buffer_.find('\n', pos_);
      if (nl != std::string::npos) {
        line.assign(buffer_, pos_, nl - pos_);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos_ = nl + 1;
        return true;
      }
      if (eof_) {
        if (pos_ >= buffer_.size()) return false;
        line.assign(buffer_, pos_, buffer_.size() - pos_);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        pos_ = buffer_.size();
        return true;
      }
      // drop the consumed prefix once per chunk, then pull more bytes
      if (pos_ > 0) {
        buffer_.erase(0, pos_);
        pos_ = 0;
      }
      fill();
    }
  }

 protected:
  // append decompressed bytes to buffer_; set eof_ when the input ends
  virtual void fill() = 0;

  std::string buffer_;
  bool eof_ = false;

 private:
  size_t pos_ = 0;
};

// zlib's gzread transparently handles both gzip and plain files
class GzipLineSource : public ChunkLineSource {
 public:
  explicit GzipLineSource(const std::string& path) : path_(path) {
    file_ = gzopen(path.c_str(), "rb");
    if (!file_) throw error(errc::io_failure, "cannot open " + path);
    gzbuffer(file_, 1 << 17);
  }
  ~GzipLineSource() override {
    if (file_) gzclose(file_);
  }

 protected:
  void fill() override {
    char chunk[1 << 16];
    int n = gzread(file_, chunk, sizeof(chunk));
    if (n < 0) {
      int zerr = 0;
      const char* msg = gzerror(file_, &zerr);
      throw error(errc::io_failure, path_ + ": " + (msg ? msg : "gzip read error"));
    }
    if (n == 0) {
      eof_ = true;
      return;
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

#ifdef PCM_HAVE_ZSTD
class ZstdLineSource : public ChunkLineSource {
 public:
  explicit ZstdLineSource(const std::string& path) : path_(path) {
    file_ = std::fopen(path.c_str(), "rb");
    if (!file_) throw error(errc::io_failure, "cannot open " + path);
    dctx_ = ZSTD_createDCtx();
    if (!dctx_) {
      std::fclose(file_);
      throw error(errc::io_failure, "zstd context allocation failed");
    }
    in_capacity_ = ZSTD_DStreamInSize();
    out_capacity_ = ZSTD_DStreamOutSize();
    in_buf_.resize(in_capacity_);
    out_buf_.resize(out_capacity_);
  }
  ~ZstdLineSource() override {
    if (dctx_) ZSTD_freeDCtx(dctx_);
    if (file_) std::fclose(file_);
  }

 protected:
  void fill() override {
    if (input_.pos >= input_.size) {
      size_t n = std::fread(in_buf_.data(), 1, in_capacity_, file_);
      if (n == 0) {
        if (std::ferror(file_)) throw error(errc::io_failure, "read failed: " + path_);
        eof_ = true;
        return;
      }
      input_ = {in_buf_.data(), n, 0};
    }
    ZSTD_outBuffer out = {out_buf_.data(), out_capacity_, 0};
    size_t ret = ZSTD_decompressStream(dctx_, &out, &input_);
    if (ZSTD_isError(ret)) {
      throw error(errc::io_failure, path_ + ": " + ZSTD_getErrorName(ret));
    }
    buffer_.append(out_buf_.data(), out.pos);
  }

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
  ZSTD_DCtx* dctx_ = nullptr;
  size_t in_capacity_ = 0, out_capacity_ = 0;
  std::vector<char> in_buf_;
  std::vector<char> out_buf_;
  ZSTD_inBuffer input_ = {nullptr, 0, 0};
};
#endif

bool has_zstd_magic(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw error(errc::io_failure, "cannot open " + path);
  unsigned char magic[4] = {0, 0, 0, 0};
  size_t n = std::fread(magic, 1, 4, f);
  std::fclose(f);
  return n == 4 && magic[0] == 0x28 && magic[1] == 0xB5 && magic[2] == 0x2F &&
         magic[3] == 0xFD;
}

}  // namespace

std::unique_ptr<LineSource> open_line_source(const std::string& path) {
  if (has_zstd_magic(path)) {
#ifdef PCM_HAVE_ZSTD
    return std::make_unique<ZstdLineSource>(path);
#else
    throw error(errc::io_failure, path + " is zstd-compressed but this build lacks zstd");
#endif
  }
  return std::make_unique<GzipLineSource>(path);
}

void for_each_line(const std::string& path,
                   const std::function<void(const std::string&)>& fn) {
  auto source = open_line_source(path);
  std::string line;
  while (source->next(line)) {
    if (!line.empty()) fn(line);
  }
}

std::vector<Post> read_posts_jsonl(const std::string& path) {
  std::vector<Post> posts;
  for_each_line(path, [&](const std::string& line) { posts.push_back(parse_post_record(line)); });
  return posts;
}

std::vector<Comment> read_comments_jsonl(const std::string& path) {
  std::vector<Comment> comments;
  for_each_line(path,
                [&](const std::string& line) { comments.push_back(parse_comment_record(line)); });
  return comments;
}

}  // namespace pcm
