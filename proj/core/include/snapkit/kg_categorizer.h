#ifndef SNAPKIT_KG_CATEGORIZER_H_
#define SNAPKIT_KG_CATEGORIZER_H_

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "snapkit/types.h"

namespace snapkit {

// True if the two objects denote the same thing: ids when both sides carry
// one, otherwise exact label equality.
bool SameObject(const FactTriple &a, const FactTriple &b);

// Read-only subject-keyed index over the previous snapshot's facts.
class PreviousFactIndex {
 public:
  explicit PreviousFactIndex(std::span<const FactTriple> previous);

  CategorizedFact Categorize(const FactTriple &recent) const;

 private:
  struct Entry {
    std::string relation_id;
    std::string object_id;
    std::string object_label;
  };
  std::unordered_map<std::string, std::vector<Entry>> by_subject_;
};

// Assigns every recent fact to Unchanged or Changed relative to the previous
// snapshot:
//   no previous fact for the subject          -> Changed / NewSubject
//   none of them carries the relation         -> Changed / NewRelation
//   one with that relation has the object     -> Unchanged / Same
//   otherwise                                 -> Changed / NewObject
// Both inputs are deduplicated on (subject_id, relation_id, object_label);
// output is sorted by that key.
std::vector<CategorizedFact> Categorize(std::vector<FactTriple> previous,
                                        std::vector<FactTriple> recent,
                                        int workers = 1);

}  // namespace snapkit

#endif  // SNAPKIT_KG_CATEGORIZER_H_
