use serde::Serialize;
use serrekit::functor_words::{
    equal_words, evaluate, normalize, parse_word_in, standard_models, Cat, Equality, FunctorWord, Model,
};

use crate::{CliError, Outcome, WordsArgs, EXIT_FAIL, EXIT_PASS};

#[derive(Serialize)]
struct WordOut {
    input: String,
    parsed: String,
    source: String,
    target: String,
    normal_form: String,
}

#[derive(Serialize)]
struct Verdict {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    models: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_only: Option<bool>,
}

#[derive(Serialize)]
struct MatrixOut {
    model: String,
    word: String,
    sign: i8,
    rows: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct WordsOut {
    schema_version: u32,
    words: Vec<WordOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    matrices: Vec<MatrixOut>,
}

fn verdict(e: Equality) -> Verdict {
    let v = Verdict { kind: "", models: None, model: None, witness: None, sign_only: None };
    match e {
        Equality::Equal => Verdict { kind: "Equal", ..v },
        Equality::EqualInAllModels(n) => Verdict { kind: "EqualInAllModels", models: Some(n), ..v },
        Equality::DistinguishedBy { model, witness, sign_only } => Verdict {
            kind: "DistinguishedBy",
            model: Some(model),
            witness: Some(witness.iter().map(ToString::to_string).collect()),
            sign_only: Some(sign_only),
            models: None,
        },
    }
}

fn verdict_line(v: &Verdict) -> String {
    match v.kind {
        "EqualInAllModels" => format!("EqualInAllModels({})", v.models.unwrap_or(0)),
        "DistinguishedBy" => format!(
            "DistinguishedBy {} witness [{}]{}",
            v.model.as_deref().unwrap_or(""),
            v.witness.as_ref().map(|w| w.join(", ")).unwrap_or_default(),
            if v.sign_only == Some(true) { " (sign only)" } else { "" }
        ),
        k => k.to_string(),
    }
}

pub(crate) fn run(a: &WordsArgs) -> Result<Outcome, CliError> {
    let context = match &a.context {
        Some(c) => Some(Cat::parse(c).ok_or_else(|| CliError::Input(format!("unknown category `{c}`")))?),
        None => None,
    };
    let models: Vec<Model> = if a.model.is_empty() {
        if a.other.is_some() || a.emit_matrix {
            standard_models()
        } else {
            Vec::new()
        }
    } else {
        a.model.iter().map(|s| Model::from_spec(s)).collect::<Result<_, _>>().map_err(CliError::input)?
    };
    // presentation rules only make sense against one fixed model
    let params = match models.as_slice() {
        [m] => Some(m.params()),
        _ => None,
    };
    let exprs: Vec<&String> = std::iter::once(&a.expr).chain(a.other.as_ref()).collect();
    let mut parsed: Vec<FunctorWord> = Vec::new();
    let mut words = Vec::new();
    for e in exprs {
        // a second word is read from the first word's source when it types there
        let hint = context.or(parsed.first().map(|w| w.source));
        let w = parse_word_in(e, hint)
            .or_else(|_| parse_word_in(e, context))
            .map_err(|err| CliError::Input(format!("`{e}`: {err}")))?;
        let n = normalize(&w, params).map_err(CliError::input)?;
        words.push(WordOut {
            input: e.clone(),
            parsed: w.to_string(),
            source: w.source.to_string(),
            target: w.target.to_string(),
            normal_form: n.to_string(),
        });
        parsed.push(w);
    }
    let verdict = match parsed.as_slice() {
        [x, y] => Some(verdict(equal_words(x, y, &models).map_err(CliError::input)?)),
        _ => None,
    };
    let mut matrices = Vec::new();
    if a.emit_matrix {
        for m in &models {
            for w in &parsed {
                let op = evaluate(w, m).map_err(CliError::input)?;
                let rows = op.matrix.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
                matrices.push(MatrixOut { model: m.name.clone(), word: w.to_string(), sign: op.sign, rows });
            }
        }
    }
    let code = match &verdict {
        Some(v) if v.kind == "DistinguishedBy" => EXIT_FAIL,
        _ => EXIT_PASS,
    };
    let stdout = if a.json {
        let out = WordsOut { schema_version: crate::SCHEMA_VERSION, words, verdict, matrices };
        serde_json::to_string_pretty(&out).expect("words serialize") + "\n"
    } else {
        let mut s = String::new();
        for w in &words {
            s.push_str(&format!("{} : {} -> {}\n  normal form: {}\n", w.parsed, w.source, w.target, w.normal_form));
        }
        if let Some(v) = &verdict {
            s.push_str(&format!("{}\n", verdict_line(v)));
        }
        for m in &matrices {
            s.push_str(&format!("{} in {} (sign {:+}):\n", m.word, m.model, m.sign));
            for r in &m.rows {
                s.push_str(&format!("  [{}]\n", r.join(" ")));
            }
        }
        s
    };
    Ok(Outcome { code, stdout, stderr: String::new() })
}
