#pragma once

#include <stdexcept>
#include <string>

namespace pcm {

enum class errc {
  // configuration / usage
  config_error,
  // data errors
  malformed_record,
  missing_field,
  bad_timestamp,
  duplicate_comment_id,
  duplicate_post_id,
  empty_corpus,
  empty_lexicon,
  cache_corrupt,
  cache_miss,
  unscored_comment,
  dimension_mismatch,
  empty_original,
  empty_vocabulary,
  empty_profiles,
  empty_input,
  empty_rows,
  too_few_points,
  io_failure,
  // external service errors
  out_of_range,
  remote_unavailable,
  malformed_response,
};

const char* errc_name(errc code);

// exit code buckets: 1 usage/config, 2 data, 3 external service
int exit_code_for(errc code);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace pcm
