//! Regenerates the files under `fixtures/`:
//!
//! ```text
//! cargo run -p semshap-cli --example make_fixtures -- crates/cli/fixtures
//! ```
//!
//! Each record draws its samples from a few meaning clusters. Correct
//! records mostly repeat the reference meaning; incorrect records scatter
//! across wrong answers, except for a few confidently wrong ones. Pairwise
//! entailment is high inside a cluster and low across clusters, with noise
//! and asymmetry.

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semshap::{
    write_entailments, write_generations, EntailmentMatrix, GenerationRecord, Sample, Task,
};

struct Item {
    question: &'static str,
    reference: &'static str,
    /// Paraphrases of the reference.
    right: &'static [&'static str],
    /// Wrong answers, one per meaning cluster.
    wrong: &'static [&'static str],
}

const QA: &[Item] = &[
    Item {
        question: "Who composed The Magic Flute?",
        reference: "Wolfgang Amadeus Mozart",
        right: &[
            "Mozart",
            "Wolfgang Amadeus Mozart",
            "It was composed by Mozart.",
        ],
        wrong: &["Ludwig van Beethoven", "Joseph Haydn", "Antonio Salieri"],
    },
    Item {
        question: "What is the capital of Australia?",
        reference: "Canberra",
        right: &["Canberra", "The capital is Canberra.", "canberra"],
        wrong: &["Sydney", "Melbourne", "Perth"],
    },
    Item {
        question: "Which planet is known as the Red Planet?",
        reference: "Mars",
        right: &["Mars", "The planet Mars", "mars"],
        wrong: &["Jupiter", "Venus", "Mercury"],
    },
    Item {
        question: "Who wrote Pride and Prejudice?",
        reference: "Jane Austen",
        right: &["Jane Austen", "Austen", "It was written by Jane Austen."],
        wrong: &["Charlotte Bronte", "Mary Shelley", "George Eliot"],
    },
    Item {
        question: "What is the chemical symbol for gold?",
        reference: "Au",
        right: &["Au", "The symbol is Au.", "au"],
        wrong: &["Ag", "Gd", "Go"],
    },
    Item {
        question: "In which year did the Berlin Wall fall?",
        reference: "1989",
        right: &["1989", "In 1989", "It fell in 1989."],
        wrong: &["1991", "1987", "1990"],
    },
    Item {
        question: "What is the longest river in South America?",
        reference: "The Amazon",
        right: &["The Amazon", "Amazon River", "the amazon"],
        wrong: &["The Orinoco", "The Parana", "The Rio Negro"],
    },
    Item {
        question: "Who painted the Mona Lisa?",
        reference: "Leonardo da Vinci",
        right: &["Leonardo da Vinci", "Da Vinci", "Leonardo"],
        wrong: &["Michelangelo", "Raphael", "Titian"],
    },
    Item {
        question: "What is the hardest natural mineral?",
        reference: "Diamond",
        right: &["Diamond", "A diamond", "diamond"],
        wrong: &["Quartz", "Corundum", "Topaz"],
    },
    Item {
        question: "Which element has atomic number 1?",
        reference: "Hydrogen",
        right: &["Hydrogen", "hydrogen gas", "It is hydrogen."],
        wrong: &["Helium", "Lithium", "Oxygen"],
    },
    Item {
        question: "What is the smallest prime number?",
        reference: "2",
        right: &["2", "two", "The number 2"],
        wrong: &["1", "3", "0"],
    },
    Item {
        question: "Which ocean lies between Africa and Australia?",
        reference: "The Indian Ocean",
        right: &["The Indian Ocean", "Indian Ocean", "the indian ocean"],
        wrong: &[
            "The Pacific Ocean",
            "The Atlantic Ocean",
            "The Southern Ocean",
        ],
    },
    Item {
        question: "Who developed the theory of general relativity?",
        reference: "Albert Einstein",
        right: &["Albert Einstein", "Einstein", "It was Einstein."],
        wrong: &["Isaac Newton", "Niels Bohr", "Max Planck"],
    },
    Item {
        question: "What is the currency of Japan?",
        reference: "The yen",
        right: &["The yen", "Japanese yen", "yen"],
        wrong: &["The won", "The yuan", "The ringgit"],
    },
    Item {
        question: "How many sides does a hexagon have?",
        reference: "Six",
        right: &["Six", "6", "A hexagon has six sides."],
        wrong: &["Five", "Eight", "Seven"],
    },
    Item {
        question: "Which gas do plants absorb for photosynthesis?",
        reference: "Carbon dioxide",
        right: &["Carbon dioxide", "CO2", "carbon dioxide gas"],
        wrong: &["Oxygen", "Nitrogen", "Methane"],
    },
    Item {
        question: "Who was the first person to walk on the Moon?",
        reference: "Neil Armstrong",
        right: &["Neil Armstrong", "Armstrong", "It was Neil Armstrong."],
        wrong: &["Buzz Aldrin", "Yuri Gagarin", "Michael Collins"],
    },
    Item {
        question: "What is the largest desert in the world?",
        reference: "The Antarctic Desert",
        right: &["The Antarctic Desert", "Antarctica", "the antarctic desert"],
        wrong: &["The Sahara", "The Gobi", "The Arabian Desert"],
    },
    Item {
        question: "Which language has the most native speakers?",
        reference: "Mandarin Chinese",
        right: &["Mandarin Chinese", "Mandarin", "Chinese Mandarin"],
        wrong: &["English", "Spanish", "Hindi"],
    },
    Item {
        question: "What is the boiling point of water at sea level in Celsius?",
        reference: "100 degrees",
        right: &["100 degrees", "100", "100 degrees Celsius"],
        wrong: &["90 degrees", "212 degrees", "120 degrees"],
    },
    Item {
        question: "Who discovered penicillin?",
        reference: "Alexander Fleming",
        right: &["Alexander Fleming", "Fleming", "Sir Alexander Fleming"],
        wrong: &["Louis Pasteur", "Robert Koch", "Joseph Lister"],
    },
    Item {
        question: "What is the tallest mountain on Earth?",
        reference: "Mount Everest",
        right: &["Mount Everest", "Everest", "mount everest"],
        wrong: &["K2", "Kangchenjunga", "Mount Kilimanjaro"],
    },
    Item {
        question: "Which country hosted the 2016 Summer Olympics?",
        reference: "Brazil",
        right: &["Brazil", "Rio de Janeiro, Brazil", "brazil"],
        wrong: &["China", "United Kingdom", "Japan"],
    },
    Item {
        question: "What is the main language spoken in Brazil?",
        reference: "Portuguese",
        right: &["Portuguese", "Brazilian Portuguese", "portuguese"],
        wrong: &["Spanish", "French", "Italian"],
    },
];

const MT: &[Item] = &[
    Item {
        question: "Le chat dort sur le canapé.",
        reference: "The cat is sleeping on the sofa.",
        right: &[
            "The cat is sleeping on the sofa.",
            "The cat sleeps on the sofa.",
            "The cat is sleeping on the couch.",
        ],
        wrong: &[
            "The dog is eating in the kitchen.",
            "A bird flies over the house.",
            "The child reads a book.",
        ],
    },
    Item {
        question: "Il pleut depuis ce matin.",
        reference: "It has been raining since this morning.",
        right: &[
            "It has been raining since this morning.",
            "It has rained since this morning.",
            "It has been raining since the morning.",
        ],
        wrong: &[
            "The sun is shining today.",
            "It will snow tomorrow night.",
            "We walked to the station.",
        ],
    },
    Item {
        question: "Nous allons au marché samedi.",
        reference: "We are going to the market on Saturday.",
        right: &[
            "We are going to the market on Saturday.",
            "We go to the market on Saturday.",
            "We are going to the market this Saturday.",
        ],
        wrong: &[
            "They stayed home on Sunday.",
            "She bought bread yesterday.",
            "The shop closes early.",
        ],
    },
    Item {
        question: "Elle a oublié son parapluie au bureau.",
        reference: "She forgot her umbrella at the office.",
        right: &[
            "She forgot her umbrella at the office.",
            "She left her umbrella at the office.",
            "She forgot her umbrella in the office.",
        ],
        wrong: &[
            "He lost his keys on the train.",
            "The office was closed all week.",
            "Her car broke down again.",
        ],
    },
    Item {
        question: "Le train part à huit heures.",
        reference: "The train leaves at eight o'clock.",
        right: &[
            "The train leaves at eight o'clock.",
            "The train departs at eight.",
            "The train leaves at eight.",
        ],
        wrong: &[
            "The bus arrives at noon.",
            "The plane was delayed by an hour.",
            "We missed the last boat.",
        ],
    },
    Item {
        question: "Mon frère habite à Lyon.",
        reference: "My brother lives in Lyon.",
        right: &[
            "My brother lives in Lyon.",
            "My brother is living in Lyon.",
            "My brother resides in Lyon.",
        ],
        wrong: &[
            "My sister works in Paris.",
            "Our parents moved to Nice.",
            "His friend studies in Lille.",
        ],
    },
    Item {
        question: "Ce livre est très intéressant.",
        reference: "This book is very interesting.",
        right: &[
            "This book is very interesting.",
            "This book is really interesting.",
            "The book is very interesting.",
        ],
        wrong: &[
            "This film is quite boring.",
            "That song is too long.",
            "The lesson was difficult.",
        ],
    },
    Item {
        question: "Ils ont fini le projet hier soir.",
        reference: "They finished the project last night.",
        right: &[
            "They finished the project last night.",
            "They completed the project last night.",
            "They finished the project yesterday evening.",
        ],
        wrong: &[
            "They started a new job today.",
            "The project will begin next month.",
            "We cancelled the meeting.",
        ],
    },
    Item {
        question: "La bibliothèque ferme à dix-huit heures.",
        reference: "The library closes at six in the evening.",
        right: &[
            "The library closes at six in the evening.",
            "The library closes at 6 pm.",
            "The library shuts at six in the evening.",
        ],
        wrong: &[
            "The museum opens at nine.",
            "The park is open all night.",
            "The school starts at eight.",
        ],
    },
    Item {
        question: "Je voudrais un café, s'il vous plaît.",
        reference: "I would like a coffee, please.",
        right: &[
            "I would like a coffee, please.",
            "I'd like a coffee, please.",
            "A coffee, please.",
        ],
        wrong: &[
            "I want a glass of water.",
            "Could you bring the bill?",
            "We need two more chairs.",
        ],
    },
    Item {
        question: "Les enfants jouent dans le jardin.",
        reference: "The children are playing in the garden.",
        right: &[
            "The children are playing in the garden.",
            "The kids are playing in the garden.",
            "The children play in the garden.",
        ],
        wrong: &[
            "The adults talk in the kitchen.",
            "A dog sleeps under the table.",
            "The teacher writes on the board.",
        ],
    },
    Item {
        question: "Il faut réserver une table pour ce soir.",
        reference: "We need to book a table for tonight.",
        right: &[
            "We need to book a table for tonight.",
            "A table must be booked for tonight.",
            "We have to reserve a table for tonight.",
        ],
        wrong: &[
            "The restaurant is closed tonight.",
            "Dinner was served at seven.",
            "They ate lunch outside.",
        ],
    },
    Item {
        question: "Sa voiture est garée devant la maison.",
        reference: "His car is parked in front of the house.",
        right: &[
            "His car is parked in front of the house.",
            "Her car is parked in front of the house.",
            "His car is parked outside the house.",
        ],
        wrong: &[
            "The bike was stolen last week.",
            "The garage door is broken.",
            "They sold their old truck.",
        ],
    },
    Item {
        question: "Nous avons visité le musée ensemble.",
        reference: "We visited the museum together.",
        right: &[
            "We visited the museum together.",
            "Together we visited the museum.",
            "We went to the museum together.",
        ],
        wrong: &[
            "They painted the walls blue.",
            "I stayed at the hotel alone.",
            "She closed the gallery early.",
        ],
    },
    Item {
        question: "Le médecin arrive dans une heure.",
        reference: "The doctor arrives in an hour.",
        right: &[
            "The doctor arrives in an hour.",
            "The doctor will arrive in one hour.",
            "The doctor is coming in an hour.",
        ],
        wrong: &[
            "The nurse left an hour ago.",
            "The patient is sleeping now.",
            "The pharmacy opens at ten.",
        ],
    },
    Item {
        question: "Cette rue est toujours bruyante.",
        reference: "This street is always noisy.",
        right: &[
            "This street is always noisy.",
            "This street is noisy all the time.",
            "The street is always loud.",
        ],
        wrong: &[
            "The village is very quiet.",
            "This road was repaired in May.",
            "The square is full of trees.",
        ],
    },
];

/// Samples per question, as in a fixed-budget sampling run.
const SAMPLES: usize = 10;

fn tokens(text: &str) -> usize {
    text.split_whitespace().count().max(1)
}

/// Builds one record and its entailment matrix from cluster assignments.
fn build(
    rng: &mut ChaCha8Rng,
    id: String,
    task: Task,
    item: &Item,
    clusters: &[usize],
) -> (GenerationRecord, EntailmentMatrix) {
    let n = clusters.len();
    let mut samples = Vec::with_capacity(n);
    for &cl in clusters {
        let text = if cl == 0 {
            *item.right.choose(rng).unwrap()
        } else {
            item.wrong[(cl - 1) % item.wrong.len()]
        };
        let len = tokens(text);
        // Answers from the largest cluster are the likely ones.
        let level = if cl == clusters[0] { 0.25 } else { 1.2 };
        let logprobs: Vec<f64> = (0..len)
            .map(|_| round4(-(level * rng.random_range(0.2..1.8f64)).max(1e-4)))
            .collect();
        let entropies: Vec<f64> = logprobs
            .iter()
            .map(|lp| round4(-lp * rng.random_range(0.8..1.6f64) + 0.05))
            .collect();
        samples.push(Sample::new(text, logprobs).with_entropies(entropies));
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        1.0
                    } else if clusters[i] == clusters[j] {
                        round4(rng.random_range(0.72..0.99))
                    } else {
                        round4(rng.random_range(0.01..0.3))
                    }
                })
                .collect()
        })
        .collect();
    let record = GenerationRecord {
        id: id.clone(),
        question: item.question.into(),
        references: vec![item.reference.into()],
        task,
        samples,
    };
    (record, EntailmentMatrix::new(id, rows).unwrap())
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Cluster labels for `n` samples. Label 0 is the reference meaning.
fn assign(rng: &mut ChaCha8Rng, n: usize, correct: bool, confident_wrong: bool) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    if correct {
        out.push(0);
        for _ in 1..n {
            out.push(if rng.random_bool(0.85) {
                0
            } else {
                rng.random_range(1..=3)
            });
        }
    } else if confident_wrong {
        out.push(1);
        for _ in 1..n {
            out.push(if rng.random_bool(0.8) {
                1
            } else {
                rng.random_range(0..=3)
            });
        }
    } else {
        out.push(1);
        for _ in 1..n {
            out.push(rng.random_range(0..=3));
        }
    }
    out
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/cli/fixtures".into()),
    );
    std::fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);

    let mut records = Vec::new();
    let mut matrices = Vec::new();
    let items = QA
        .iter()
        .map(|i| (Task::Qa, i))
        .chain(MT.iter().map(|i| (Task::Mt, i)));
    for (k, (task, item)) in items.enumerate() {
        let prefix = if task == Task::Qa { "qa" } else { "mt" };
        let id = format!("{prefix}-{k:03}");
        let correct = k % 2 == 0;
        let confident_wrong = !correct && k % 6 == 1;
        let clusters = assign(&mut rng, SAMPLES, correct, confident_wrong);
        let (r, e) = build(&mut rng, id, task, item, &clusters);
        records.push(r);
        matrices.push(e);
    }
    write_generations(dir.join("generations.jsonl"), &records).unwrap();
    write_entailments(dir.join("entailments.jsonl"), &matrices).unwrap();
    let identity: Vec<_> = records
        .iter()
        .map(|r| EntailmentMatrix::identity(&r.id, r.n()))
        .collect();
    write_entailments(dir.join("identity_entailments.jsonl"), &identity).unwrap();

    // Adversarial structures whose raw correlation matrices are indefinite.
    let chain = vec![
        vec![1.0, 1.0, 0.0],
        vec![1.0, 1.0, 1.0],
        vec![0.0, 1.0, 1.0],
    ];
    let bipartite: Vec<Vec<f64>> = (0..12)
        .map(|i| {
            (0..12)
                .map(|j| {
                    if i == j || (i < 6) != (j < 6) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut adv_records = Vec::new();
    let mut adv_matrices = Vec::new();
    for (id, rows) in [("adv-chain", chain), ("adv-bipartite", bipartite)] {
        let n = rows.len();
        let samples = (0..n)
            .map(|i| {
                Sample::new(format!("answer {i}"), vec![-0.5, -0.25]).with_entropies(vec![0.7, 0.4])
            })
            .collect();
        adv_records.push(GenerationRecord {
            id: id.into(),
            question: "Adversarial agreement pattern".into(),
            references: vec!["answer 0".into()],
            task: Task::Qa,
            samples,
        });
        adv_matrices.push(EntailmentMatrix::new(id, rows).unwrap());
    }
    write_generations(dir.join("adversarial_generations.jsonl"), &adv_records).unwrap();
    write_entailments(dir.join("adversarial_entailments.jsonl"), &adv_matrices).unwrap();
    println!("wrote {} records to {}", records.len(), dir.display());
}
