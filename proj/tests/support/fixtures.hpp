#pragma once

#include <string>

namespace lexdep::testing {

// The running example: "John Smith, the president of IBM, announced his
// resignation yesterday."
inline const std::string kOverviewTree =
    "(S (NP (NP (NNP John) (NNP Smith))"
    "       (, ,)"
    "       (NP (NP (DT the) (NN president))"
    "           (PP (IN of) (NP (NNP IBM))))"
    "       (, ,))"
    "   (VP (VBD announced)"
    "       (NP (PRP$ his) (NN resignation))"
    "       (NP (NN yesterday)))"
    "   (. .))";

inline const std::string kOverviewTagged =
    "John/NNP Smith/NNP ,/, the/DT president/NN of/IN IBM/NNP ,/, "
    "announced/VBD his/PRP$ resignation/NN yesterday/NN ./.";

// Hand corpus for the backoff arithmetic checks. Label Z is outside the
// head-rule table, so the first child is always the head.
inline const std::string kBackoffCorpus =
    "(Z (B b) (A a))\n"
    "(Z (B b) (A a))\n"
    "(Z (B b) (A c))\n"
    "(Z (C x) (B b) (A a))\n"
    "(Z (B d) (C x))\n";

// Gap-model hand corpus: one S gap (into a baseNP) and one N gap sharing
// the level-2 context.
inline const std::string kGapCorpus =
    "(Z (V v) (NP (N n)))\n"
    "(Z (V v) (N m))\n";

}  // namespace lexdep::testing
