#include "dairy/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dairy/csv.hpp"
#include "dairy/sql_agent.hpp"

namespace dairy::fixtures {

double Rng::uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

std::int64_t Rng::range(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(g_() % span);
}

double Rng::normal(double mean, double sd) {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Civil-from-days and days-from-civil (proleptic Gregorian).
std::string iso_date(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

std::int64_t days_from_iso(const std::string& iso) {
  int yi = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(iso.c_str(), "%d-%u-%u", &yi, &m, &d) != 3) throw ValidationError("bad ISO date " + iso);
  std::int64_t y = yi - (m <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

namespace {

std::string round_str(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double round_to(double v, int digits) {
  const double f = std::pow(10.0, digits);
  return std::round(v * f) / f;
}

const std::int64_t kBaseDay = days_from_iso("2024-01-01");

const char* kBreeds[] = {"Holstein", "Jersey", "Brown Swiss", "Ayrshire", "Guernsey", "Montbeliarde"};

}  // namespace

// ---- relational fixture ----

std::string generate_sql_fixture(const SqlFixtureSpec& spec) {
  Rng rng(spec.seed);
  const auto schema = TableSchema::milk_records();
  std::string out;
  for (std::size_t i = 0; i < schema.columns.size(); ++i) out += (i ? "," : "") + schema.columns[i].name;
  out += "\n";
  if (spec.rows == 0 || spec.animals == 0) return out;

  struct Animal {
    std::string id, herd, birth, calving, sire, dam;
    std::int64_t lactation;
  };
  std::vector<Animal> animals;
  const std::size_t herds = std::max<std::size_t>(1, spec.herds);
  for (std::size_t a = 0; a < spec.animals; ++a) {
    Animal an;
    char id[32];
    std::snprintf(id, sizeof id, "A%04zu", a + 1);
    an.id = id;
    char herd[32];
    std::snprintf(herd, sizeof herd, "H%02zu", a % herds + 1);
    an.herd = herd;
    an.lactation = rng.range(1, 7);
    const auto birth = kBaseDay - 700 - an.lactation * 400 - rng.range(0, 200);
    an.birth = iso_date(birth);
    an.calving = iso_date(kBaseDay - rng.range(20, 300));
    an.sire = kBreeds[rng.range(0, 2)];
    an.dam = rng.chance(0.8) ? "Holstein" : kBreeds[rng.range(1, 3)];
    animals.push_back(std::move(an));
  }

  // Which rows are engineered above the threshold.
  const std::size_t above = std::min(spec.rows_above_threshold, spec.rows);
  std::vector<std::size_t> order(spec.rows);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(i) - 1))]);
  }
  std::vector<bool> high(spec.rows, false);
  for (std::size_t i = 0; i < above; ++i) high[order[i]] = true;

  // Between 0.1 and 0.9 kg away from the threshold so rounding cannot cross it.
  const double hi_floor = std::floor(spec.threshold_kg * 10.0 + 1.0) / 10.0;
  const double lo_ceiling = std::ceil(spec.threshold_kg * 10.0 - 1.0) / 10.0;

  for (std::size_t r = 0; r < spec.rows; ++r) {
    const auto& an = r < animals.size() ? animals[r] : animals[static_cast<std::size_t>(
                                                            rng.range(0, static_cast<std::int64_t>(animals.size()) - 1))];
    const auto herd_no = an.herd.back() - '0';
    const std::size_t pi = std::min<std::size_t>(static_cast<std::size_t>(an.lactation - 1),
                                                 spec.yield_mean_by_parity.size() - 1);
    double milk;
    if (high[r]) {
      milk = round_to(rng.uniform(hi_floor, hi_floor + 14.0), 1);
    } else {
      milk = round_to(std::clamp(rng.normal(spec.yield_mean_by_parity[pi] - 3.0, spec.yield_sd), 12.0, lo_ceiling), 1);
    }
    const double fat_pct = round_to(std::clamp(rng.normal(3.7 + (herd_no == 3 ? 0.45 : 0.0), 0.25), 2.8, 5.2), 2);
    const double prot_pct = round_to(std::clamp(rng.normal(3.2, 0.15), 2.7, 3.9), 2);
    const auto dim = rng.range(5, 400);
    const auto scc = rng.range(15, 900) * 1000;
    const std::vector<std::string> cells{
        an.id,
        an.herd,
        an.birth,
        an.calving,
        an.sire,
        an.dam,
        std::to_string(dim),
        std::to_string(an.lactation),
        round_str(milk, 1),
        round_str(milk * fat_pct / 100.0, 3),
        round_str(milk * prot_pct / 100.0, 3),
        round_str(fat_pct, 2),
        round_str(prot_pct, 2),
        std::to_string(scc),
    };
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv::escape(cells[i]);
    out += "\n";
  }
  return out;
}

// ---- document fixture ----

const std::vector<std::string>& event_types() {
  static const std::vector<std::string> types = {
      "MilkRecording", "Sold",   "PregnancyCheckNegative", "Birth",  "DailyMilkMeterYields",
      "Heat",          "Bought", "Diagnosis",              "DryOff", "PregnancyCheckRecheck",
      "PregnancyCheckPositive", "Calving", "Died", "Breeding"};
  return types;
}

namespace {

EventRecord make_event(Rng& rng, const std::string& type, std::int64_t calving_day, std::int64_t dim,
                       std::int64_t parity) {
  EventRecord e;
  e.event_type = type;
  e.test_date = iso_date(calving_day + dim);
  e.days_in_milk = dim;
  const double base = 27.0 + 3.0 * static_cast<double>(std::min<std::int64_t>(parity, 3));
  if (type == "MilkRecording") {
    e.milk_yield_kg = round_to(std::clamp(rng.normal(base, 5.0), 8.0, 55.0), 1);
    e.fat_pct = round_to(std::clamp(rng.normal(3.9, 0.3), 2.8, 5.5), 2);
    e.protein_pct = round_to(std::clamp(rng.normal(3.3, 0.2), 2.7, 4.0), 2);
    e.lactose_pct = round_to(std::clamp(rng.normal(4.75, 0.12), 4.2, 5.2), 2);
    e.somatic_cell_count = rng.range(20, 700) * 1000;
  } else if (type == "DailyMilkMeterYields") {
    e.milk_yield_kg = round_to(std::clamp(rng.normal(base, 5.0), 8.0, 55.0), 1);
  } else if (type == "Breeding") {
    e.insemination_number = rng.range(1, 4);
    e.breeding_type = rng.chance(0.85) ? "AI" : (rng.chance(0.5) ? "Natural" : "EmbryoTransfer");
  } else if (type == "PregnancyCheckPositive") {
    e.pregnancy_result_code = "P";
  } else if (type == "PregnancyCheckNegative") {
    e.pregnancy_result_code = "N";
  } else if (type == "PregnancyCheckRecheck") {
    e.pregnancy_result_code = "R";
  } else if (type == "Calving") {
    e.calving_ease = rng.range(1, 4);
    e.days_in_milk = 0;
    e.test_date = iso_date(calving_day);
  }
  return e;
}

}  // namespace

std::vector<HerdDocument> generate_herd_documents(const NoSqlFixtureSpec& spec) {
  Rng rng(spec.seed);
  const auto& types = event_types();
  static const std::vector<std::string> routine = {
      "MilkRecording", "MilkRecording", "MilkRecording", "DailyMilkMeterYields", "DailyMilkMeterYields",
      "Heat", "Breeding", "PregnancyCheckPositive", "PregnancyCheckNegative", "Diagnosis"};
  const std::size_t herds = std::max<std::size_t>(1, spec.herds);
  const std::int64_t max_parity = std::max<std::int64_t>(1, spec.max_parity);
  std::vector<HerdDocument> docs;
  std::size_t next_forced = 0;
  for (std::size_t i = 0; i < spec.cows; ++i) {
    HerdDocument d;
    char id[32];
    std::snprintf(id, sizeof id, "DK%04zu", 1001 + i);
    d.animal_id = id;
    d.herd_id = std::string("HERD-") + static_cast<char>('A' + i % herds);
    // Parities cycle through 1..max first so every value occurs, then vary.
    const std::int64_t parity =
        i < static_cast<std::size_t>(max_parity) ? static_cast<std::int64_t>(i) + 1 : rng.range(1, max_parity);
    const auto current_calving = kBaseDay - rng.range(30, 250);
    d.birth_date = iso_date(current_calving - 700 - (parity - 1) * 390 - rng.range(0, 60));

    std::vector<Lactation> lacts;
    if (parity > 1) lacts.push_back({parity - 1, iso_date(current_calving - 390), {}});
    lacts.push_back({parity, iso_date(current_calving), {}});

    const std::size_t n = spec.events_per_cow;
    for (std::size_t k = 0; k < n; ++k) {
      auto& lac = (lacts.size() == 2 && k < n / 3) ? lacts.front() : lacts.back();
      const auto calving_day = days_from_iso(lac.calving_date);
      std::string type;
      if (k == 0 && lacts.size() == 1) {
        type = "Calving";
      } else if (k == n - 1 && next_forced < types.size()) {
        type = types[next_forced++];
      } else {
        type = routine[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(routine.size()) - 1))];
      }
      const auto dim = type == "Calving" ? 0 : rng.range(5, 300);
      lac.events.push_back(make_event(rng, type, calving_day, dim, lac.parity));
    }
    for (auto& l : lacts) {
      std::stable_sort(l.events.begin(), l.events.end(),
                       [](const EventRecord& a, const EventRecord& b) { return a.test_date < b.test_date; });
    }
    d.lactations = std::move(lacts);
    docs.push_back(std::move(d));
  }
  // One unambiguous top producer.
  if (!docs.empty()) {
    auto& l = docs[docs.size() / 3].lactations.back();
    EventRecord e;
    e.event_type = "MilkRecording";
    const auto dim = std::int64_t{62};
    e.test_date = iso_date(days_from_iso(l.calving_date) + dim);
    e.days_in_milk = dim;
    e.milk_yield_kg = 58.4;
    e.fat_pct = 3.71;
    e.protein_pct = 3.12;
    e.lactose_pct = 4.81;
    e.somatic_cell_count = 88000;
    for (auto& ev : l.events) {
      if (ev.event_type == "MilkRecording" || ev.event_type == "DailyMilkMeterYields") {
        const auto keep_type = ev.event_type;
        ev = e;
        ev.event_type = keep_type;
        if (keep_type == "DailyMilkMeterYields") {
          ev.fat_pct.reset();
          ev.protein_pct.reset();
          ev.lactose_pct.reset();
          ev.somatic_cell_count.reset();
        }
        break;
      }
    }
  }
  return docs;
}

std::string generate_nosql_fixture(const NoSqlFixtureSpec& spec) {
  json arr = json::array();
  for (const auto& d : generate_herd_documents(spec)) arr.push_back(d.to_json());
  return arr.dump(1) + "\n";
}

// ---- corpus ----

namespace {

struct Stub {
  const char* title;
  int year;
  const char* abstract;
};

const Stub kStubs[] = {
    {"Dose-response effects of 3-nitrooxypropanol on enteric methane and milk production in lactating Holstein cows",
     2021,
     "Twelve trials were pooled to estimate how the feed additive 3-nitrooxypropanol (3-NOP) changes enteric methane "
     "emission in dairy cows. Methane production fell by 28 to 35 percent at commercial doses while dry matter intake, "
     "milk yield and energy-corrected milk were not affected. Milk fat concentration increased slightly. The additive "
     "inhibits methyl-coenzyme M reductase in rumen methanogens."},
    {"Red seaweed Asparagopsis taxiformis as a feed additive to reduce methane emissions from dairy cattle", 2020,
     "Lactating dairy cows were fed increasing inclusion rates of the red seaweed Asparagopsis taxiformis. Enteric "
     "methane yield decreased by up to 67 percent at the highest dose, but feed intake and milk production declined at "
     "that level. Low inclusion reduced methane emissions while maintaining milk yield. Bromoform residues in milk are "
     "discussed."},
    {"Dietary nitrate supplementation and methane emission in dairy cows: a meta-analysis", 2019,
     "Nitrate acts as an alternative hydrogen sink in the rumen. Across 21 studies, nitrate supplementation lowered "
     "methane emission of dairy cows by about 15 percent per kilogram of dry matter intake without reducing milk "
     "production, although adaptation is required to avoid nitrite toxicity."},
    {"Essential oils, tannins and saponins as rumen modifiers for methane mitigation in dairy cows", 2018,
     "Plant secondary compounds were screened as feed additives. Condensed tannins and some essential oil blends reduced "
     "methane emission modestly, while effects on milk production were neutral. Responses were inconsistent between "
     "diets and adaptation periods."},
    {"Supplemental dietary fat and oilseeds lower enteric methane in lactating dairy cows", 2016,
     "Feeding linseed, rapeseed and other lipid supplements reduced methane emission by about 4 percent for each 1 "
     "percent of added fat. Milk yield was maintained when total fat stayed below 6 percent of dietary dry matter; milk "
     "fat depression occurred at higher inclusion."},
    {"Effect of concentrate feeding level on methane emissions from grazing dairy cows", 2014,
     "Grazing dairy cows received low, medium or high amounts of concentrate. Methane per kilogram of milk declined as "
     "concentrate feeding increased, reflecting higher milk production, while daily methane emission was unchanged."},
    {"Residual feed intake and its relationship with enteric methane emission across lactation in Holstein cows", 2024,
     "Residual feed intake (the difference between observed and expected feed intake) was recorded with methane "
     "production, methane intensity and methane yield throughout lactation. Cows with lower residual feed intake emitted "
     "less methane per kilogram of milk. Correlations with methane yield were weak and changed sign across lactation "
     "stages."},
    {"Genetic parameters of residual feed intake and feed efficiency in lactating dairy cattle", 2015,
     "Heritability of residual feed intake was estimated at 0.15 to 0.25 in first-lactation dairy cows. Residual feed "
     "intake was genetically independent of milk production, making it a candidate trait for selection on feed "
     "efficiency."},
    {"Milk production of Holstein, Jersey and Brown Swiss cows in United States herds", 2017,
     "Lactation records from national milk recording were compared across breeds. Holstein cows had the highest milk "
     "yield, averaging more than 11,000 kg per lactation, while Jersey cows produced milk with the highest fat and "
     "protein percentages. Brown Swiss cows were intermediate."},
    {"Crossbreeding Holstein cows with Montbeliarde and Viking Red: production and fertility", 2019,
     "Three-breed crossbred cows produced slightly less milk than purebred Holstein cows but had better fertility, "
     "fewer health events and longer productive life. Profit per cow per day was similar."},
    {"Machine learning prediction of clinical mastitis from automatic milking system data", 2022,
     "Random forest, gradient boosting and neural network models were trained on sensor data from automatic milking "
     "systems to predict clinical mastitis. Gradient boosting reached the best sensitivity. Machine learning tasks "
     "addressed in dairy farming include disease detection, milk yield forecasting and fertility prediction."},
    {"Forecasting daily milk yield with machine learning: a comparison of regression trees, support vector machines and "
     "recurrent neural networks",
     2021,
     "Daily milk yield of individual cows was forecast up to seven days ahead. Recurrent neural networks (long short-"
     "term memory) outperformed support vector machines and regression trees. Machine learning applications for dairy "
     "herd management are reviewed."},
    {"Estrus and lameness detection in dairy cows using accelerometers and machine learning classifiers", 2020,
     "Neck and leg accelerometers recorded cow activity. Estrus detection used logistic regression and k-nearest "
     "neighbours; lameness detection used random forests. Both machine learning tasks achieved high specificity on "
     "commercial farms."},
    {"Invited review: Machine learning in dairy science, tasks, techniques and challenges", 2023,
     "This review summarises machine learning in dairy farming: disease detection such as mastitis and lameness, milk "
     "yield prediction, feed intake estimation, fertility and culling decisions. Techniques include random forest, "
     "gradient boosting, support vector machines, deep neural networks and clustering. Data integration remains a "
     "challenge."},
    {"Computer vision for automated body condition scoring of dairy cows with convolutional neural networks", 2020,
     "Depth images from a 3D camera were scored with a convolutional neural network. The computer vision framework "
     "predicted body condition score within 0.25 units in more than 90 percent of cows."},
    {"Individual cow identification with YOLO object detection and coat-pattern recognition", 2022,
     "A computer vision pipeline with the YOLO object detection framework located cows in barn video, and a ResNet "
     "classifier identified individual Holstein cows by coat pattern with 96 percent accuracy."},
    {"Pose estimation with DeepLabCut for lameness detection in walking dairy cows", 2023,
     "Keypoints along the back and legs were tracked with the DeepLabCut pose estimation framework. Gait features "
     "derived with computer vision classified lame cows with an accuracy close to human locomotion scoring."},
    {"Modelling the lactation curve of dairy cows: MilkBot and Wood functions compared", 2013,
     "Test-day milk yields were fitted with the MilkBot function (scale, ramp, offset and decay parameters) and with the "
     "Wood gamma function. MilkBot described both the rise to peak yield and the persistency; peak yield arrived near "
     "60 days in milk for multiparous cows."},
    {"Heat stress reduces milk yield and alters milk composition of Holstein cows", 2018,
     "Cows exposed to a temperature-humidity index above 72 lost up to 2 kg of milk per day. Cooling with fans and "
     "sprinklers recovered a large part of the loss. Milk protein percentage declined under heat stress."},
    {"Somatic cell count as an indicator of udder health and milk quality", 2016,
     "Bulk tank and individual cow somatic cell counts were related to intramammary infection. Counts above 200,000 "
     "cells per mL indicated subclinical mastitis and were associated with lower milk yield."},
    {"Transition cow management and the incidence of metabolic disease", 2017,
     "Negative energy balance around calving increased the risk of ketosis and displaced abomasum. Grouping strategies, "
     "dietary cation-anion difference and monitoring of non-esterified fatty acids were evaluated."},
    {"Colostrum feeding and early-life growth of dairy calves", 2019,
     "Calves fed 4 L of high-quality colostrum within two hours of birth had greater passive immunity and faster growth "
     "to weaning than calves fed 2 L."},
};

const char* kTopics[] = {"rumen fermentation", "milk fat synthesis", "dry period length", "grazing systems",
                         "automatic milking", "hoof health",       "reproductive efficiency", "silage quality",
                         "protein nutrition", "calf housing",      "genomic selection",   "water intake"};
const char* kOutcomes[] = {"milk yield", "milk protein", "feed efficiency", "fertility", "animal welfare",
                           "longevity"};
const char* kDesigns[] = {"a randomized trial", "an observational study across commercial herds",
                          "a meta-analysis", "a simulation study"};

}  // namespace

std::vector<AbstractDoc> generate_corpus(const CorpusFixtureSpec& spec) {
  Rng rng(spec.seed);
  std::vector<AbstractDoc> docs;
  std::size_t n = 0;
  auto next_id = [&] {
    char id[32];
    std::snprintf(id, sizeof id, "jds-%04zu", ++n);
    return std::string(id);
  };
  for (const auto& s : kStubs) {
    AbstractDoc d;
    d.doc_id = next_id();
    d.title = s.title;
    d.abstract_text = s.abstract;
    d.year = s.year;
    d.doi = "10.5555/jds-fixture." + d.doc_id.substr(4);
    d.authors = {"Fixture A.", "Fixture B."};
    docs.push_back(std::move(d));
  }
  while (docs.size() < spec.docs) {
    const std::string topic = kTopics[rng.range(0, std::size(kTopics) - 1)];
    const std::string outcome = kOutcomes[rng.range(0, std::size(kOutcomes) - 1)];
    const std::string design = kDesigns[rng.range(0, std::size(kDesigns) - 1)];
    const auto cows = rng.range(40, 2400);
    const auto effect = rng.range(2, 18);
    AbstractDoc d;
    d.doc_id = next_id();
    d.title = "Effects of " + topic + " on " + outcome + " in dairy herds (study " + std::to_string(n) + ")";
    d.abstract_text = "We report " + design + " of " + std::to_string(cows) + " dairy cows examining " + topic +
                      ". Changes in " + topic + " shifted " + outcome + " by about " + std::to_string(effect) +
                      " percent. Implications for herd management are discussed.";
    d.year = static_cast<int>(rng.range(1975, 2024));
    d.doi = "10.5555/jds-fixture." + d.doc_id.substr(4);
    d.authors = {"Fixture C."};
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string generate_corpus_fixture(const CorpusFixtureSpec& spec) {
  std::string out;
  for (const auto& d : generate_corpus(spec)) {
    out += json{{"id", d.doc_id},       {"title", d.title}, {"abstract", d.abstract_text}, {"year", d.year},
                {"doi", d.doi},         {"authors", d.authors}, {"source", d.source_tag}}
               .dump() +
           "\n";
  }
  return out;
}

std::string web_fixture() {
  const json j = json::array({
      {{"match", "USDA secretary"},
       {"results",
        {{{"title", "Secretary of Agriculture | USDA"},
          {"url", "https://www.usda.gov/our-agency/about-usda/our-secretary"},
          {"snippet", "Brooke L. Rollins was sworn in as the 33rd U.S. Secretary of Agriculture."}}}}},
      {{"match", "milk cows"},
       {"results",
        {{{"title", "Milk Production | USDA NASS"},
          {"url", "https://www.nass.usda.gov/Publications/Todays_Reports/"},
          {"snippet", "The number of milk cows on farms in the United States was 9.35 million head (fixture value)."}}}}},
      {{"match", "dairy cows are currently"},
       {"results",
        {{{"title", "Dairy Data | USDA Economic Research Service"},
          {"url", "https://www.ers.usda.gov/data-products/dairy-data/"},
          {"snippet", "The U.S. dairy herd numbered about 9.35 million cows (fixture value)."}}}}},
      {{"match", "dairy farms"},
       {"results",
        {{{"title", "Licensed dairy herds | USDA NASS"},
          {"url", "https://www.nass.usda.gov/Surveys/Guide_to_NASS_Surveys/Milk_Production/"},
          {"snippet", "Licensed dairy operations fell from about 45,300 to about 24,800 over ten years while average "
                      "herd size grew (fixture values)."}}}}},
      {{"match", "Cargill"},
       {"results",
        {{{"title", "Our history | Cargill"},
          {"url", "https://www.cargill.com/about/cargill-history"},
          {"snippet", "Cargill was founded in 1865 by William Wallace Cargill with a grain warehouse in Conover, Iowa."}}}}},
      {{"match", "Miel Hostens"},
       {"results",
        {{{"title", "Miel Hostens | Department of Animal Science, Cornell University"},
          {"url", "https://www.ansci.cornell.edu/"},
          {"snippet", "Miel Hostens is a faculty member in the Cornell University Department of Animal Science "
                      "working on dairy data science."}}}}},
      {{"match", "computer vision"},
       {"results",
        {{{"title", "Computer vision on dairy farms | Extension overview"},
          {"url", "https://extension.example.org/dairy/computer-vision"},
          {"snippet", "Frameworks such as YOLO, Mask R-CNN and DeepLabCut are used for cow identification, body "
                      "condition scoring and lameness detection."}}}}},
  });
  return j.dump(1) + "\n";
}

}  // namespace dairy::fixtures
