#include "pcm/errors.hpp"

namespace pcm {

const char* errc_name(errc code) {
  switch (code) {
    case errc::config_error: return "ConfigError";
    case errc::malformed_record: return "MalformedRecord";
    case errc::missing_field: return "MissingField";
    case errc::bad_timestamp: return "BadTimestamp";
    case errc::duplicate_comment_id: return "DuplicateCommentId";
    case errc::duplicate_post_id: return "DuplicatePostId";
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::empty_lexicon: return "EmptyLexicon";
    case errc::cache_corrupt: return "CacheCorrupt";
    case errc::cache_miss: return "CacheMiss";
    case errc::unscored_comment: return "UnscoredComment";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::empty_original: return "EmptyOriginal";
    case errc::empty_vocabulary: return "EmptyVocabulary";
    case errc::empty_profiles: return "EmptyProfiles";
    case errc::empty_input: return "EmptyInput";
    case errc::empty_rows: return "EmptyRows";
    case errc::too_few_points: return "TooFewPoints";
    case errc::io_failure: return "IoFailure";
    case errc::out_of_range: return "OutOfRange";
    case errc::remote_unavailable: return "RemoteUnavailable";
    case errc::malformed_response: return "MalformedResponse";
  }
  return "UnknownError";
}

int exit_code_for(errc code) {
  switch (code) {
    case errc::config_error:
      return 1;
    case errc::out_of_range:
    case errc::remote_unavailable:
    case errc::malformed_response:
      return 3;
    default:
      return 2;
  }
}

}  // namespace pcm
