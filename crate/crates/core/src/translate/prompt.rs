use serde::Serialize;

use crate::vocab::Vocabulary;

/// The five-part translation prompt. `assembled` joins the sections in
/// order, followed by the request line carrying the user query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptDocument {
    pub role_section: String,
    pub context_section: String,
    pub steps_section: String,
    pub fewshot_section: String,
    pub output_format_section: String,
    pub assembled: String,
}

/// Query/expression pairs shown to the model.
pub const FEW_SHOT: [(&str, &str); 5] = [
    ("two trucks close to each other", "truck(a) and truck(b) and is_close(a, b)"),
    ("a plane to the left of a storage tank", "plane(a) and storage_tank(b) and left_of(a, b)"),
    ("three ships aligned", "ship(a) and ship(b) and ship(c) and left_of(a, b) and left_of(b, c)"),
    ("an isolated roundabout", "roundabout(a) and isolated_from(a)"),
    (
        "six ships in column and four cars aligned",
        "ship(a) and ship(b) and ship(c) and ship(d) and ship(e) and ship(f) and \
         is_above(a, b) and is_above(b, c) and is_above(c, d) and is_above(d, e) and is_above(e, f) and \
         car(g) and car(h) and car(i) and car(j) and \
         left_of(g, h) and left_of(h, i) and left_of(i, j)",
    ),
];

pub const REQUEST_PREFIX: &str = "Convert to FOL the following query: ";

pub fn build_prompt(query: &str, v: &Vocabulary) -> PromptDocument {
    let role_section =
        "You are an expert logician with a background in remote sensing (RS) image analysis.".to_string();

    let relations: Vec<&str> = v
        .atomic_relations()
        .iter()
        .chain(v.macro_relations())
        .map(String::as_str)
        .collect();
    let context_section = format!(
        "Queries in natural language describe the content of aerial and satellite images and are used \
         to retrieve those images. Translate each query into a first order logic (FOL) expression, \
         using only the objects and relations listed below.\n\n\
         Objects:\n{}\n\n\
         Relations:\n{}",
        v.object_classes().join(", "),
        relations.join(", "),
    );

    let steps_section = "Steps to follow:\n\
         - Step 1: give every object mentioned in the query its own variable, a distinct lowercase letter.\n\
         - Step 2: write the query as a conjunction of object atoms and relation atoms over those variables, \
         joined by \"and\"."
        .to_string();

    let mut fewshot_section = String::from("Conversion examples:");
    for (i, (q, fol)) in FEW_SHOT.iter().enumerate() {
        fewshot_section.push_str(&format!("\n\nExample {}\n- Query: {q}\n- FOL expression: {fol}", i + 1));
    }

    let output_format_section = "Return the answer as JSON with exactly these keys:\n\
         {\n  \"variables\": {\"a\": \"category1\", \"b\": \"category2\"},\n  \
         \"translations\": [{\"query\": \"<query>\", \"expression\": \"<FOL expression>\"}]\n}"
        .to_string();

    let assembled = [
        role_section.as_str(),
        context_section.as_str(),
        steps_section.as_str(),
        fewshot_section.as_str(),
        output_format_section.as_str(),
        &format!("{REQUEST_PREFIX}{query}"),
    ]
    .join("\n\n");

    PromptDocument { role_section, context_section, steps_section, fewshot_section, output_format_section, assembled }
}
