#include "mer/spotify/client.hpp"

#include "mer/util/parallel.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <thread>

namespace mer::spotify {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string base64(std::string_view in) {
  std::string out(4 * ((in.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

bool retryable(int status) { return status >= 500 && status <= 599; }

double retry_after(const HttpResponse& r, double fallback) {
  auto it = r.headers.find("retry-after");
  if (it == r.headers.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  return end != it->second.c_str() && v >= 0.0 ? v : fallback;
}

}  // namespace

std::string url_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
  const auto scheme_end = request.url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed url");
  const auto path_start = request.url.find('/', scheme_end + 3);
  const std::string origin = request.url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  httplib::Headers headers;
  std::string content_type = "application/x-www-form-urlencoded";
  for (const auto& [k, v] : request.headers) {
    if (lower(k) == "content-type") {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }
  httplib::Result res = request.method == "POST" ? client.Post(path, headers, request.body, content_type)
                                                 : client.Get(path, headers);
  if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
  HttpResponse out;
  out.status = res->status;
  out.body = res->body;
  for (const auto& [k, v] : res->headers) out.headers[lower(k)] = v;
  return out;
}

ApiCredentials ApiCredentials::from_env() {
  const char* id = std::getenv("SPOTIFY_CLIENT_ID");
  const char* secret = std::getenv("SPOTIFY_CLIENT_SECRET");
  if (!id || !*id || !secret || !*secret) {
    throw CredentialError("SPOTIFY_CLIENT_ID and SPOTIFY_CLIENT_SECRET must both be set");
  }
  return {id, secret};
}

double string_similarity(std::string_view a, std::string_view b) {
  auto norm = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return lower(std::string(s));
  };
  const std::string x = norm(a), y = norm(b);
  if (x.empty() && y.empty()) return 1.0;
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return 1.0 - static_cast<double>(prev[y.size()]) / static_cast<double>(std::max(x.size(), y.size()));
}

double match_confidence(std::string_view artist, std::string_view title, std::string_view candidate_artist,
                        std::string_view candidate_title) {
  return 0.5 * (string_similarity(artist, candidate_artist) + string_similarity(title, candidate_title));
}

SpotifyClient::SpotifyClient(ApiCredentials credentials, std::shared_ptr<HttpTransport> transport,
                             ClientOptions options)
    : credentials_(std::move(credentials)), transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) throw InvalidArgument("spotify client needs a transport");
  if (options_.batch_size < 1 || options_.batch_size > 100) throw InvalidArgument("batch size must be in [1, 100]");
  if (options_.concurrency < 1 || options_.max_attempts < 1) throw InvalidArgument("invalid client options");
  if (!options_.sleep) {
    options_.sleep = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
  if (!options_.now) {
    options_.now = [] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
    };
  }
}

std::size_t SpotifyClient::requests_sent() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::size_t SpotifyClient::token_requests() const {
  std::lock_guard lock(mutex_);
  return token_requests_;
}

HttpResponse SpotifyClient::send_counted(const HttpRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++requests_;
  }
  return transport_->send(request);
}

std::string SpotifyClient::token_locked(bool force) {
  if (credentials_.client_id.empty() || credentials_.client_secret.empty()) {
    throw CredentialError("spotify client id and secret are required");
  }
  if (!force && !token_.empty() && options_.now() + options_.refresh_margin_seconds < token_expiry_) return token_;

  HttpRequest req{"POST",
                  options_.token_url,
                  {{"Authorization", "Basic " + base64(credentials_.client_id + ":" + credentials_.client_secret)},
                   {"Content-Type", "application/x-www-form-urlencoded"}},
                  "grant_type=client_credentials"};
  double backoff = options_.backoff_seconds;
  int waits = 0;
  for (int attempt = 1;;) {
    ++token_requests_;
    ++requests_;
    HttpResponse res;
    try {
      res = transport_->send(req);
    } catch (const TransportError& e) {
      if (attempt++ >= options_.max_attempts) throw;
      spdlog::warn("token request failed ({}); retrying in {}s", e.what(), backoff);
      options_.sleep(backoff);
      backoff *= 2.0;
      continue;
    }
    if (res.status == 400 || res.status == 401 || res.status == 403) {
      throw CredentialError("spotify rejected the client credentials (HTTP " + std::to_string(res.status) + ")");
    }
    if (res.status == 429 && ++waits <= options_.max_rate_limit_waits) {
      options_.sleep(retry_after(res, options_.default_retry_after));
      continue;
    }
    if (retryable(res.status) && attempt++ < options_.max_attempts) {
      options_.sleep(backoff);
      backoff *= 2.0;
      continue;
    }
    if (res.status != 200) throw ApiError(res.status, "token endpoint returned HTTP " + std::to_string(res.status));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res.body);
      token_ = j.at("access_token").get<std::string>();
      token_expiry_ = options_.now() + j.value("expires_in", 3600.0);
    } catch (const nlohmann::json::exception&) {
      throw ApiError(res.status, "token endpoint returned a malformed body");
    }
    spdlog::debug("obtained access token");
    return token_;
  }
}

std::string SpotifyClient::authenticate() {
  std::lock_guard lock(mutex_);
  return token_locked(false);
}

HttpResponse SpotifyClient::call(HttpRequest request, bool authorized) {
  double backoff = options_.backoff_seconds;
  int waits = 0;
  bool refreshed = false;
  std::string token = authorized ? authenticate() : std::string();
  for (int attempt = 1;;) {
    HttpRequest r = request;
    if (authorized) r.headers.emplace_back("Authorization", "Bearer " + token);
    HttpResponse res;
    try {
      res = send_counted(r);
    } catch (const TransportError& e) {
      if (attempt++ >= options_.max_attempts) throw;
      spdlog::warn("request failed ({}); retrying in {}s", e.what(), backoff);
      options_.sleep(backoff);
      backoff *= 2.0;
      continue;
    }
    if (res.status == 401 && authorized && !refreshed) {
      refreshed = true;
      std::lock_guard lock(mutex_);
      token = token_locked(true);
      continue;
    }
    if (res.status == 401) throw CredentialError("spotify rejected the access token");
    if (res.status == 429) {
      if (++waits > options_.max_rate_limit_waits) throw ApiError(429, "rate limited too many times");
      const double wait = retry_after(res, options_.default_retry_after);
      spdlog::info("rate limited; waiting {}s", wait);
      options_.sleep(wait);
      continue;
    }
    if (retryable(res.status)) {
      if (attempt++ >= options_.max_attempts) {
        throw ApiError(res.status, "HTTP " + std::to_string(res.status) + " after retries");
      }
      options_.sleep(backoff);
      backoff *= 2.0;
      continue;
    }
    if (res.status != 200) throw ApiError(res.status, "HTTP " + std::to_string(res.status));
    return res;
  }
}

ResolveResult SpotifyClient::resolve_tracks(std::span<const data::SongRecord> records) {
  struct Outcome {
    std::optional<TrackMatch> match;
    std::string reason;
  };
  std::vector<Outcome> out(records.size());
  parallel_for(records.size(), options_.concurrency, [&](std::size_t i) {
    const auto& rec = records[i];
    const std::string q = "artist:" + rec.artist + " track:" + rec.title;
    try {
      const auto res = call({"GET",
                             options_.api_base + "/search?q=" + url_encode(q) +
                                 "&type=track&limit=" + std::to_string(options_.search_limit),
                             {},
                             {}},
                            true);
      const auto j = nlohmann::json::parse(res.body);
      const auto& items = j.at("tracks").at("items");
      double best = -1.0;
      TrackMatch m{rec.song_id, {}, 0.0};
      for (const auto& item : items) {
        const auto name = item.at("name").get<std::string>();
        const auto& artists = item.at("artists");
        const std::string artist = artists.empty() ? std::string() : artists.at(0).at("name").get<std::string>();
        const double c = match_confidence(rec.artist, rec.title, artist, name);
        if (c > best) {
          best = c;
          m.spotify_track_id = item.at("id").get<std::string>();
          m.match_confidence = c;
        }
      }
      if (items.empty()) {
        out[i].reason = "no search results";
      } else if (best < options_.match_threshold) {
        out[i].reason = "best candidate confidence " + std::to_string(best) + " below threshold";
      } else {
        out[i].match = m;
      }
    } catch (const CredentialError&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      out[i].reason = std::string("malformed search response: ") + e.what();
    } catch (const Error& e) {
      out[i].reason = e.what();
    }
  });
  ResolveResult result;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].match) {
      result.matches.push_back(*out[i].match);
    } else {
      result.unmatched.push_back({records[i].song_id, out[i].reason});
    }
  }
  spdlog::info("resolved {} of {} songs ({} unmatched)", result.matches.size(), records.size(),
               result.unmatched.size());
  return result;
}

FetchSummary SpotifyClient::fetch_audio_features(std::span<const TrackMatch> matches,
                                                 const std::filesystem::path& store_path) {
  if (matches.empty()) throw InvalidArgument("no track matches to fetch");
  data::AudioStore store;
  if (std::filesystem::exists(store_path)) store = data::load_audio_store(store_path);

  FetchSummary summary;
  summary.requested = matches.size();
  std::vector<const TrackMatch*> pending;
  for (const auto& m : matches) {
    if (store.count(m.song_id)) {
      ++summary.skipped_cached;
    } else {
      pending.push_back(&m);
    }
  }

  std::vector<std::vector<const TrackMatch*>> batches;
  for (std::size_t i = 0; i < pending.size(); i += options_.batch_size) {
    batches.emplace_back(pending.begin() + static_cast<std::ptrdiff_t>(i),
                         pending.begin() + static_cast<std::ptrdiff_t>(std::min(pending.size(), i + options_.batch_size)));
  }

  struct Entry {
    std::string song_id;
    std::optional<data::AudioFeatureVector> features;
    std::string invalid;
  };
  const std::size_t round = static_cast<std::size_t>(options_.concurrency);
  for (std::size_t start = 0; start < batches.size(); start += round) {
    const std::size_t n = std::min(round, batches.size() - start);
    std::vector<std::vector<Entry>> results(n);
    parallel_for(n, options_.concurrency, [&](std::size_t k) {
      const auto& batch = batches[start + k];
      std::string ids;
      for (const auto* m : batch) ids += (ids.empty() ? "" : ",") + m->spotify_track_id;
      const auto res = call({"GET", options_.api_base + "/audio-features?ids=" + url_encode(ids), {}, {}}, true);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(res.body).at("audio_features");
      } catch (const nlohmann::json::exception&) {
        throw ApiError(res.status, "malformed audio-features response");
      }
      if (!j.is_array() || j.size() != batch.size()) throw ApiError(res.status, "audio-features response has the wrong length");
      for (std::size_t i = 0; i < batch.size(); ++i) {
        Entry e{batch[i]->song_id, std::nullopt, {}};
        if (!j[i].is_null()) {
          try {
            auto v = data::AudioFeatureVector::from_json(j[i]);
            v.validate();
            e.features = v;
          } catch (const Error& err) {
            e.invalid = err.what();
          }
        }
        results[k].push_back(std::move(e));
      }
    });
    for (auto& batch : results) {
      ++summary.batches;
      for (auto& e : batch) {
        if (e.features) {
          ++summary.fetched;
        } else if (e.invalid.empty()) {
          summary.null_features.push_back(e.song_id);
        } else {
          spdlog::warn("track for {} failed validation: {}", e.song_id, e.invalid);
          summary.invalid.emplace_back(e.song_id, e.invalid);
        }
        store[e.song_id] = e.features;
      }
    }
    data::save_audio_store(store_path, store);
  }
  if (batches.empty() && !std::filesystem::exists(store_path)) data::save_audio_store(store_path, store);
  spdlog::info("fetched {} tracks in {} batches, skipped {} cached, {} without features, {} invalid", summary.fetched,
               summary.batches, summary.skipped_cached, summary.null_features.size(), summary.invalid.size());
  return summary;
}

}  // namespace mer::spotify
