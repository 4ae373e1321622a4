#pragma once

#include <unistd.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>

#include "kgatt/graph_store.hpp"

namespace kgatt::testing {

using NamedTriple = std::array<const char*, 3>;

/// Graph whose train split (and adjacency) are `train`, indexed.
inline KnowledgeGraph make_graph(std::initializer_list<NamedTriple> train, bool add_inverse = true,
                                 std::initializer_list<NamedTriple> test = {}) {
  KnowledgeGraph kg;
  auto& vocab = kg.vocabulary();
  for (const auto& t : train) {
    kg.split(Split::train).push_back(
        {vocab.intern_entity(t[0]), vocab.intern_relation(t[1]), vocab.intern_entity(t[2])});
  }
  for (const auto& t : test) {
    kg.split(Split::test).push_back(
        {vocab.intern_entity(t[0]), vocab.intern_relation(t[1]), vocab.intern_entity(t[2])});
  }
  kg.use_train_split_as_facts();
  kg.build_index(add_inverse);
  return kg;
}

/// Random multigraph with `edges` distinct triples over `nodes` entities.
inline KnowledgeGraph random_graph(std::size_t nodes, std::size_t relations, std::size_t edges, std::uint64_t seed,
                                   bool add_inverse = true) {
  Rng rng(seed);
  KnowledgeGraph kg;
  auto& vocab = kg.vocabulary();
  for (std::size_t i = 0; i < nodes; ++i) vocab.intern_entity("e" + std::to_string(i));
  for (std::size_t r = 0; r < relations; ++r) vocab.intern_relation("r" + std::to_string(r));
  std::vector<Triple> triples;
  std::size_t guard = 0;
  while (triples.size() < edges && guard++ < 100000) {
    Triple t{static_cast<EntityId>(uniform_index(rng, nodes)), static_cast<RelationId>(uniform_index(rng, relations)),
             static_cast<EntityId>(uniform_index(rng, nodes))};
    if (t.subject == t.object) continue;
    if (std::find(triples.begin(), triples.end(), t) != triples.end()) continue;
    triples.push_back(t);
  }
  kg.split(Split::train) = triples;
  kg.use_train_split_as_facts();
  kg.build_index(add_inverse);
  return kg;
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kgatt_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace kgatt::testing
