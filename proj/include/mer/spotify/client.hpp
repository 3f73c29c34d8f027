#pragma once

#include "mer/common.hpp"
#include "mer/data/dataset.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mer::spotify {

class TransportError : public Error {
 public:
  using Error::Error;
};

// Rejected credentials. Never retried.
class CredentialError : public Error {
 public:
  using Error::Error;
};

class ApiError : public Error {
 public:
  ApiError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct HttpRequest {
  std::string method;  // GET or POST
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

// One HTTP exchange. Implementations throw TransportError when no response
// was received and must be safe to call from several threads.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport; https URLs go through OpenSSL.
class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

struct ApiCredentials {
  std::string client_id;
  std::string client_secret;

  // SPOTIFY_CLIENT_ID / SPOTIFY_CLIENT_SECRET; throws CredentialError when
  // either is unset or empty.
  static ApiCredentials from_env();
};

struct ClientOptions {
  std::string token_url = "https://accounts.spotify.com/api/token";
  std::string api_base = "https://api.spotify.com/v1";
  int max_attempts = 3;             // per request, network errors and 5xx
  double backoff_seconds = 0.5;     // doubled after every failed attempt
  int max_rate_limit_waits = 10;    // 429 responses tolerated per request
  double default_retry_after = 1.0;
  double refresh_margin_seconds = 30.0;
  int concurrency = 4;
  std::size_t batch_size = 100;
  int search_limit = 5;
  double match_threshold = 0.5;
  std::function<void(double)> sleep;  // seconds; default std::this_thread::sleep_for
  std::function<double()> now;        // monotonic seconds; default steady_clock
};

struct TrackMatch {
  std::string song_id;
  std::string spotify_track_id;
  double match_confidence = 0.0;
};

struct Unmatched {
  std::string song_id;
  std::string reason;
};

struct ResolveResult {
  std::vector<TrackMatch> matches;
  std::vector<Unmatched> unmatched;
};

struct FetchSummary {
  std::size_t requested = 0;
  std::size_t skipped_cached = 0;
  std::size_t fetched = 0;
  std::size_t batches = 0;
  std::vector<std::string> null_features;
  std::vector<std::pair<std::string, std::string>> invalid;  // song_id, reason
};

/// Case-folded, whitespace-trimmed Levenshtein similarity in [0, 1].
double string_similarity(std::string_view a, std::string_view b);
/// Mean of the artist and title similarities.
double match_confidence(std::string_view artist, std::string_view title, std::string_view candidate_artist,
                        std::string_view candidate_title);

class SpotifyClient {
 public:
  SpotifyClient(ApiCredentials credentials, std::shared_ptr<HttpTransport> transport, ClientOptions options = {});

  /// Client-credentials flow. Returns a token valid for at least the refresh
  /// margin, requesting a new one only when needed.
  std::string authenticate();

  /// Searches artist + title for every record and keeps the best candidate
  /// when its confidence reaches the threshold.
  ResolveResult resolve_tracks(std::span<const data::SongRecord> records);

  /// Batched audio-features requests for matches not yet in the store at
  /// `store_path`. The store is rewritten atomically after every round of
  /// concurrent batches, so an interrupted run resumes where it stopped.
  FetchSummary fetch_audio_features(std::span<const TrackMatch> matches, const std::filesystem::path& store_path);

  std::size_t requests_sent() const;
  std::size_t token_requests() const;

 private:
  HttpResponse call(HttpRequest request, bool authorized);
  HttpResponse send_counted(const HttpRequest& request);
  std::string token_locked(bool force);

  ApiCredentials credentials_;
  std::shared_ptr<HttpTransport> transport_;
  ClientOptions options_;
  mutable std::mutex mutex_;
  std::string token_;
  double token_expiry_ = 0.0;
  std::size_t requests_ = 0;
  std::size_t token_requests_ = 0;
};

std::string url_encode(std::string_view s);

}  // namespace mer::spotify
