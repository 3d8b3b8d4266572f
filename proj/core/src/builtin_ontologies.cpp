// Copyright 2026 The HeadCT-ONE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "headct_one/error.hpp"
#include "headct_one/ontology.hpp"

namespace headct {

namespace {

struct DescriptorRow {
  const char* path;
  std::initializer_list<const char*> examples;
};

struct FindingRow {
  const char* concept_id;
  std::initializer_list<const char*> synonyms;
};

// Descriptor hierarchy: one row per deepest category, with its example
// phrases. Intermediate levels are derived from the paths.
// "moderate", "new" and "clear" each appear under two categories in the
// source table; they are kept only under severity/moderate,
// temporality/acute and occupancy/empty respectively.
const DescriptorRow kDescriptorRows[] = {
    {"quantity/numeric", {"5 lesions", "3 fractures"}},
    {"quantity/qualitative/single", {"isolated", "solitary", "single"}},
    {"quantity/qualitative/multiple", {"several", "multiple", "numerous", "a few"}},
    {"size/numeric", {"5 mm", "10 cm"}},
    {"size/qualitative/very_small", {"tiny", "microscopic"}},
    {"size/qualitative/small", {"small"}},
    {"size/qualitative/medium", {"average", "medium size", "normal size"}},
    {"size/qualitative/large", {"large", "big", "enlarged"}},
    {"size/qualitative/very_large", {"enormous", "huge", "very large", "gigantic", "very enlarged"}},
    {"shape/regular/spherical", {"round", "oval", "ovoid"}},
    {"shape/regular/saccular", {"saccular"}},
    {"shape/regular/curvilinear", {"curvilinear"}},
    {"shape/regular/crescentic", {"crescentic"}},
    {"shape/regular/biconvex", {"biconvex"}},
    {"shape/regular/laminar", {"laminar", "sheet-like", "layer"}},
    {"shape/regular/tubular", {"tubular", "cylindrical"}},
    {"shape/regular/fusiform", {"fusiform"}},
    {"shape/irregular/lobulated", {"lobulated"}},
    {"shape/irregular/spiculated", {"spiculated"}},
    {"shape/irregular/amorphous", {"amorphous"}},
    {"homogeneity/homogeneous", {"homogeneous"}},
    {"homogeneity/heterogeneous", {"heterogeneous"}},
    {"density/hypodense", {"hypodense", "hypoattenuation", "hypodensity"}},
    {"density/isodense", {"isodense"}},
    {"density/hyperdense", {"hyperdense", "hyperattenuation", "hyperdensity"}},
    {"density/mixed", {"mixed density"}},
    {"margin/well_defined", {"circumscribed", "well defined", "well circumscribed", "well delimited"}},
    {"margin/poorly_defined", {"ill-defined", "poorly circumscribed"}},
    {"severity/minimal", {"minimal"}},
    {"severity/mild", {"mild"}},
    {"severity/moderate", {"moderate"}},
    {"severity/severe", {"severe"}},
    {"temporality/acute", {"acute", "new"}},
    {"temporality/subacute", {"subacute"}},
    {"temporality/chronic", {"chronic", "old", "remote"}},
    {"temporality/acute_on_chronic", {"acute on chronic"}},
    {"temporality/age_indeterminate", {"age-indeterminate", "unknown age"}},
    {"distribution/localized", {"focal", "localized"}},
    {"distribution/diffuse", {"diffuse"}},
    {"distribution/confluent", {"confluent"}},
    {"distribution/scattered", {"scattered"}},
    {"distribution/petechial", {"petechial"}},
    {"distribution/multifocal", {"multifocal"}},
    {"enhancement/present/homogeneous", {"homogeneous enhancement"}},
    {"enhancement/present/heterogeneous", {"heterogeneous enhancement"}},
    {"enhancement/present/peripheral", {"peripheral enhancement"}},
    {"enhancement/present/central", {"central enhancement"}},
    {"enhancement/present/rim", {"rim-like enhancement"}},
    {"enhancement/present/patchy", {"patchy enhancement"}},
    {"enhancement/absent", {"no enhancement"}},
    {"certainty/definitely_present", {"there is", "there are", "with"}},
    {"certainty/probably_present", {"probably", "likely"}},
    {"certainty/possibly_present", {"possibly"}},
    {"certainty/uncertain", {"cannot rule out"}},
    {"certainty/definitely_absent", {"no evidence of", "there is no", "without"}},
    {"composition/gas", {"gas", "gaseous", "air"}},
    {"composition/fluid/simple_fluid", {"fluid-like", "simple fluid"}},
    {"composition/fluid/csf", {"csf"}},
    {"composition/fluid/serous", {"serous"}},
    {"composition/fluid/hemorrhagic", {"hemorrhagic"}},
    {"composition/fluid/mucinous", {"mucinous", "colloid"}},
    {"composition/solid/soft_tissue", {"soft-tissue density"}},
    {"composition/solid/fatty", {"fatty"}},
    {"composition/solid/fibrous", {"fibrous"}},
    {"composition/solid/calcified", {"calcific density", "calcified"}},
    {"composition/solid/sclerotic", {"sclerotic"}},
    {"composition/mixed", {"mixed", "semisolid", "fluid and solid components", "solid with hemorrhagic components"}},
    {"complexity/simple", {"simple"}},
    {"complexity/complex", {"complex"}},
    {"change/resolution", {"resolution", "resolved", "cleared", "disappeared"}},
    {"change/improvement", {"improved", "improving"}},
    {"change/increase", {"increased", "increase in size", "larger", "increasing"}},
    {"change/decrease", {"decreased", "decrease in size", "decreasing", "smaller"}},
    {"change/worsening", {"worsened", "worsening"}},
    {"change/appearance", {"appeared", "is now present"}},
    {"change/mixed_change", {"one metastasis increased in size and the other one resolved"}},
    {"change/stable", {"stable", "unchanged", "similar", "similar in appearance"}},
    {"normalcy/normal", {"normal"}},
    {"normalcy/abnormal", {"abnormal"}},
    {"caliber/dilated", {"dilated ventricles", "dilated vessels"}},
    {"caliber/normal", {"average lumen", "normal cavity", "normal calibre"}},
    {"caliber/reduced", {"narrowed artery", "collapsed veins", "collapsed ventricles"}},
    {"malignancy_status/definitely_benign", {"benign"}},
    {"malignancy_status/probably_benign", {"probably benign lesion"}},
    {"malignancy_status/indeterminate", {"indeterminate hypodensity"}},
    {"malignancy_status/probably_malignant", {"probably malignant", "suspicious"}},
    {"malignancy_status/definitely_malignant", {"cancerous", "malignant"}},
    {"patency/patent", {"patent"}},
    {"patency/mostly_patent", {"mostly patent"}},
    {"patency/obstructed", {"obstruction", "obstructed"}},
    {"patency/occluded", {"occlusion"}},
    {"occupancy/empty", {"empty", "clear", "well-aereated"}},
    {"occupancy/partially_filled", {"partially filled with"}},
    {"occupancy/fully_filled", {"full", "fully filled"}},
    {"occupancy/engorged", {"engorged"}},
    {"integrity/intact", {"intact", "unruptured"}},
    {"integrity/partially_compromised", {"partially ruptured", "partially disrupted"}},
    {"integrity/compromised", {"ruptured", "disrupted", "disruption"}},
    {"direction/left_to_right", {"left-to-right"}},
    {"direction/right_to_left", {"right-to-left"}},
    {"direction/anterior_to_posterior", {"anterior-to-posterior"}},
    {"direction/posterior_to_anterior", {"posterior-to-anterior"}},
    {"direction/upwards", {"upwards"}},
    {"direction/downwards", {"downwards"}},
    {"component_involved/mucosal", {"mucosal"}},
    {"component_involved/muscular", {"muscular"}},
    {"component_involved/osseous", {"osseous", "bony"}},
    {"position/normal_position", {"normal position"}},
    {"position/abnormal_position", {"displaced", "abnormal position"}},
};

// Findings list with synonyms.
const FindingRow kFindingRows[] = {
    {"infarct", {"ischemic stroke", "infarction"}},
    {"hemorrhage", {"hematoma", "bleed", "blood"}},
    {"agenesis", {}},
    {"lesion", {"mass", "tumor", "tumour"}},
    {"thickening", {}},
    {"aneurysm", {}},
    {"coils", {}},
    {"subluxation", {}},
    {"dissociation", {}},
    {"effacement", {}},
    {"calcification", {}},
    {"thrombosis", {"clot", "thrombus"}},
    {"beam_hardening_artefact", {}},
    {"atrophy", {"involution", "atrophic changes"}},
    {"cavum_septum_pellucidum", {}},
    {"chiari_1", {}},
    {"chiari_2", {}},
    {"cochlear_implant", {}},
    {"cyst", {}},
    {"colpocephaly", {}},
    {"hydrocephalus", {}},
    {"hypodensity", {}},
    {"necrosis", {}},
    {"craniotomy", {}},
    {"collection", {}},
    {"dbs_electrodes", {}},
    {"thinning", {}},
    {"demyelination", {}},
    {"diffuse_axonal_injury", {}},
    {"venous_gas", {}},
    {"arachnoidocele", {}},
    {"encephalitis", {}},
    {"encephalomalacia", {}},
    {"entrapment", {}},
    {"external_ventricular_drainage", {"ventriculostomy catheter", "ventriculostomy"}},
    {"exophthalmos", {}},
    {"empyema", {}},
    {"herniation", {}},
    {"fracture", {}},
    {"erosion", {}},
    {"fibrous_dysplasia", {}},
    {"foreign_body", {}},
    {"fungal_sinusitis", {}},
    {"shape_abnormality", {}},
    {"heterotopia", {}},
    {"hyperdense_artery", {}},
    {"hyperostosis", {}},
    {"hypopneumatisation", {}},
    {"hypoxic_ischaemic_encephalopathy", {}},
    {"intracranial_pressure_monitor", {"icp"}},
    {"insular_ribbon_sign", {}},
    {"silicone", {}},
    {"debris", {}},
    {"opacity", {}},
    {"post_surgical_change", {}},
    {"meningioma", {}},
    {"metallic_artefact", {}},
    {"midline_shift", {}},
    {"movement_artefact", {}},
    {"mucocoele", {}},
    {"non_hemorrhagic_contusion", {}},
    {"optic_neuritis", {}},
    {"abscess", {}},
    {"fat_stranding", {}},
    {"prosthesis", {}},
    {"osteoma", {}},
    {"otosclerosis", {}},
    {"papilloedema", {}},
    {"perivascular_spaces", {}},
    {"pseudo_sah", {}},
    {"resection_cavity", {}},
    {"schizencephaly", {}},
    {"haemangioma", {}},
    {"small_vessel_disease", {"white matter change", "white matter changes", "ischemic change", "ischemic changes", "microvascular changes", "microvascular disease", "microvascular change"}},
    {"stapes_implants", {}},
    {"ectopic_air", {"emphysema", "pneumocephalus"}},
    {"arthritis", {}},
    {"dislocation", {}},
    {"edema", {}},
    {"transphenoidal_surgery", {}},
    {"vascular_clips", {"aneurysm clips"}},
    {"vascular_stents", {"stent", "stents"}},
    {"venous_infarct", {}},
    {"venous_thrombosis", {"cvt", "venous sinus thrombosis", "cerebral venous thrombosis"}},
    {"ventriculoperitoneal_shunt", {"vp shunt"}},
    {"mass_effect", {}},
    {"loss_of_gray_white_matter_differentiation", {}},
    {"abnormality", {"pathology", "finding", "process", "abnormalities"}},
};

}  // namespace

ConceptTable builtin_finding_table() {
  std::vector<Concept> concepts;
  for (const FindingRow& row : kFindingRows) {
    Concept c;
    c.concept_id = row.concept_id;
    for (const char* s : row.synonyms) c.synonyms.emplace_back(s);
    concepts.push_back(std::move(c));
  }
  return ConceptTable(OntologyKind::kFinding, std::move(concepts));
}

ConceptTable builtin_descriptor_table() {
  std::vector<Concept> concepts;
  std::map<std::string, std::size_t> index;
  for (const DescriptorRow& row : kDescriptorRows) {
    const std::string path = row.path;
    // Create every prefix level, parent before child.
    std::size_t pos = 0;
    std::optional<std::string> parent;
    while (true) {
      std::size_t slash = path.find('/', pos);
      std::string id = path.substr(0, slash);
      if (!index.count(id)) {
        Concept c;
        c.concept_id = id;
        c.parent = parent;
        index.emplace(id, concepts.size());
        concepts.push_back(std::move(c));
      }
      if (slash == std::string::npos) break;
      parent = id;
      pos = slash + 1;
    }
    Concept& leaf = concepts[index.at(path)];
    for (const char* e : row.examples) leaf.synonyms.emplace_back(e);
  }
  return ConceptTable(OntologyKind::kDescriptor,
                      with_level_paths(std::move(concepts)));
}

std::vector<std::string> demo_anatomy_roots() {
  return {"head", "epidural space"};
}

ConceptTable builtin_anatomy_table() {
  return ingest_anatomy(demo_anatomy_csv(), demo_anatomy_roots(),
                        kDefaultAnatomyDepth);
}

OntologySet load_builtin_ontologies() {
  OntologySet set{builtin_finding_table(), builtin_descriptor_table(),
                  builtin_anatomy_table(),
                  "builtin: findings list (88 concepts), descriptor hierarchy, "
                  "demo head anatomy (edge file, roots head + epidural space, "
                  "max depth 5)"};
  for (OntologyKind kind : {OntologyKind::kFinding, OntologyKind::kDescriptor,
                            OntologyKind::kAnatomy}) {
    const ConceptTable& t = set.table(kind);
    if (t.empty()) {
      throw Error(ErrorCode::kCorruptData,
                  "built-in " + std::string(to_string(kind)) + " table is empty");
    }
    auto diags = validate_ontology(t);
    if (!diags.empty()) {
      throw Error(ErrorCode::kCorruptData,
                  "built-in " + std::string(to_string(kind)) +
                      " table: " + diags.front().message);
    }
  }
  return set;
}

const OntologySet& builtin_ontologies() {
  static const OntologySet set = load_builtin_ontologies();
  return set;
}

}  // namespace headct
