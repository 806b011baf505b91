use serde_json::{Map, Value};
use thiserror::Error;

use crate::engine::Action;
use crate::environment::Args;
use crate::metrics::extract_answer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no tool call and no answer tag in `{0}`")]
    Unrecognized(String),
    #[error("`{name}` is missing argument `{arg}`")]
    MissingArgument { name: String, arg: &'static str },
    #[error("arguments of `{0}` are not a JSON object")]
    BadArguments(String),
}

/// Maps raw model output to an action.
///
/// A JSON object with a `name` field is read as a tool call, either with an
/// `arguments` field (object or JSON-encoded string) or with the arguments
/// flattened next to `name`. Anything else falls back to the answer tag.
pub fn parse_action(text: &str) -> Result<Action, ParseError> {
    let trimmed = text.trim();
    if let Ok(Value::Object(obj)) = serde_json::from_str::<Value>(trimmed) {
        if let Some(Value::String(name)) = obj.get("name") {
            let args = match obj.get("arguments") {
                Some(a) => decode_object(name, a)?,
                None => {
                    let mut rest = obj.clone();
                    rest.remove("name");
                    rest
                }
            };
            return function_call(name, &args);
        }
    }
    match extract_answer(text) {
        Some(choice) => Ok(Action::answer(choice)),
        None => Err(ParseError::Unrecognized(truncate(trimmed))),
    }
}

/// Maps one function call (name plus decoded arguments) to an action.
pub fn function_call(name: &str, args: &Map<String, Value>) -> Result<Action, ParseError> {
    let string_arg = |arg: &'static str| -> Result<String, ParseError> {
        match args.get(arg) {
            Some(Value::String(s)) => Ok(s.clone()),
            _ => Err(ParseError::MissingArgument {
                name: name.to_string(),
                arg,
            }),
        }
    };
    Ok(match name {
        "skill" => Action::skill(string_arg("kit")?),
        "doc" => Action::doc(string_arg("tool_id")?),
        "call" => {
            let tool_id = string_arg("tool_id")?;
            let tool_args = match args.get("tool_args") {
                None | Some(Value::Null) => Map::new(),
                Some(v) => decode_object(&tool_id, v)?,
            };
            Action::call(tool_id, to_args(tool_args))
        }
        "filelist" | "get_filelist" => {
            let path = string_arg("path").or_else(|_| string_arg("dir"))?;
            Action::filelist(path)
        }
        "answer" => Action::answer(string_arg("answer").or_else(|_| string_arg("text"))?),
        other => Action::call(other, to_args(args.clone())),
    })
}

pub(crate) fn decode_object(name: &str, value: &Value) -> Result<Map<String, Value>, ParseError> {
    match value {
        Value::Object(m) => Ok(m.clone()),
        Value::String(s) if s.trim().is_empty() => Ok(Map::new()),
        Value::String(s) => match serde_json::from_str(s) {
            Ok(Value::Object(m)) => Ok(m),
            _ => Err(ParseError::BadArguments(name.to_string())),
        },
        _ => Err(ParseError::BadArguments(name.to_string())),
    }
}

fn to_args(map: Map<String, Value>) -> Args {
    map.into_iter().collect()
}

fn truncate(s: &str) -> String {
    const MAX: usize = 120;
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn structured_payloads() {
        assert_eq!(
            parse_action(r#"{"name":"doc","tool_id":"statistics.mean"}"#).unwrap(),
            Action::doc("statistics.mean")
        );
        assert_eq!(
            parse_action(r#"{"name":"skill","arguments":"{\"kit\":\"index\"}"}"#).unwrap(),
            Action::skill("index")
        );
        let call = parse_action(
            r#"{"name":"call","arguments":{"tool_id":"statistics.mean","tool_args":"{\"values\":[1,2]}"}}"#,
        )
        .unwrap();
        let mut args = Args::new();
        args.insert("values".into(), json!([1, 2]));
        assert_eq!(call, Action::call("statistics.mean", args));
        assert_eq!(
            parse_action(r#"{"name":"get_filelist","arguments":{"path":"q/"}}"#).unwrap(),
            Action::filelist("q/")
        );
    }

    #[test]
    fn answer_tags() {
        assert_eq!(
            parse_action("so... <Answer>D<Answer>").unwrap(),
            Action::answer("D")
        );
        assert_eq!(
            parse_action("I think A. <Answer>B</Answer>").unwrap(),
            Action::answer("B")
        );
    }

    #[test]
    fn unparseable() {
        assert!(matches!(
            parse_action("hmm"),
            Err(ParseError::Unrecognized(_))
        ));
        assert!(matches!(
            parse_action(r#"{"name":"doc"}"#),
            Err(ParseError::MissingArgument { .. })
        ));
        assert!(matches!(
            parse_action(r#"{"name":"call","tool_id":"a.b","tool_args":"[1]"}"#),
            Err(ParseError::BadArguments(_))
        ));
    }

    #[test]
    fn concrete_function_names_become_calls() {
        let a = parse_action(r#"{"name":"mean","arguments":{"values":[1.0]}}"#).unwrap();
        assert_eq!(a.kind(), "call");
    }
}
