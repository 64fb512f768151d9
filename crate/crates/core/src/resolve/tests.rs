use super::*;
use crate::appsim::{launcher_screen, AppModel};
use crate::extract::extract_s2rs;
use crate::ingest::parse_report;

const FIXTURE: &str = include_str!("../../fixtures/expensedroid.app.json");

fn model() -> AppModel {
    AppModel::from_json(FIXTURE).unwrap()
}

fn cfg(m: &AppModel) -> MatchConfig {
    MatchConfig::default().for_app(m.app_name(), m.synonyms())
}

fn step(text: &str) -> S2r {
    let report = parse_report(text).unwrap();
    let sentence = &report.paragraphs[0].sentences[0];
    extract_s2rs(sentence, 0).unwrap().steps.remove(0)
}

fn resolve_on(text: &str, screen: &str) -> Resolution {
    let m = model();
    let s = m.screen(screen).unwrap().clone();
    resolve_step(&step(text), &s, &cfg(&m), &InputCounter::default())
}

fn resolved(text: &str, screen: &str) -> (EventKind, Option<String>, Option<String>) {
    match resolve_on(text, screen) {
        Resolution::Resolved(r) => (r.event, r.component, r.input),
        other => panic!("{text:?} on {screen}: {other:?}"),
    }
}

#[test]
fn term_normalization() {
    assert_eq!(terms("Add entry"), ["add", "entry"]);
    assert_eq!(terms("Settings"), ["setting"]);
    assert_eq!(id_terms("btn_add"), ["btn", "add"]);
    assert_eq!(id_terms("menuExportSd2"), ["menu", "export", "sd2"]);
    assert_eq!(id_terms("field-price"), ["field", "price"]);
}

#[test]
fn open_app_on_launcher() {
    let m = model();
    let launcher = launcher_screen(m.screen_size());
    for text in [
        "Open ExpenseDroid",
        "Open the app",
        "Launch the expense tracker",
    ] {
        let r = resolve_step(&step(text), &launcher, &cfg(&m), &InputCounter::default());
        assert_eq!(
            r,
            Resolution::Resolved(ResolvedInteraction {
                event: EventKind::OpenApp,
                component: None,
                input: None,
                generated_input: false
            }),
            "{text}"
        );
    }
}

#[test]
fn taps_by_label_and_description() {
    assert_eq!(
        resolved("Tap the add entry button", "Main").1.as_deref(),
        Some("btn_add")
    );
    assert_eq!(
        resolved("Tap the menu button", "Main"),
        (EventKind::TapMenu, Some("btn_menu".into()), None)
    );
    assert_eq!(
        resolved("Tap Settings", "MainMenu").1.as_deref(),
        Some("menu_settings")
    );
    assert_eq!(
        resolved("Tap save", "CreateEntry").1.as_deref(),
        Some("btn_save")
    );
}

#[test]
fn selection_verbs_restrict_to_choices() {
    assert_eq!(
        resolved("Choose blue", "ColorPicker").1.as_deref(),
        Some("opt_blue")
    );
}

#[test]
fn type_steps() {
    assert_eq!(
        resolved("Enter \"Lunch\" in the description field", "CreateEntry"),
        (
            EventKind::Type,
            Some("field_description".into()),
            Some("Lunch".into())
        )
    );
    assert_eq!(
        resolved("Set the price to 12", "CreateEntry"),
        (
            EventKind::Type,
            Some("field_price".into()),
            Some("12".into())
        )
    );
    assert_eq!(
        resolved("Type \"Taxi\"", "CreateEntry"),
        (
            EventKind::Type,
            Some("field_description".into()),
            Some("Taxi".into())
        )
    );
}

#[test]
fn generated_input_when_no_literal() {
    let m = model();
    let s = m.screen("CreateEntry").unwrap();
    let mut counter = InputCounter::default();
    counter.advance();
    match resolve_step(&step("Enter the price"), s, &cfg(&m), &counter) {
        Resolution::Resolved(r) => {
            assert_eq!(r.component.as_deref(), Some("field_price"));
            assert_eq!(r.input.as_deref(), Some("2"));
            assert!(r.generated_input);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(counter.peek(), 2);
}

#[test]
fn ambiguous_field() {
    match resolve_on("Tap the field", "CreateEntry") {
        Resolution::MultipleMatch { candidates } => {
            let ids: Vec<String> = candidates
                .iter()
                .filter_map(|c| match c {
                    Candidate::Component { id, .. } => Some(id.clone()),
                    _ => None,
                })
                .collect();
            assert_eq!(ids, ["field_description", "field_price"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_verb_is_action_mismatch() {
    assert_eq!(
        resolve_on("Fix the sorting", "Main"),
        Resolution::Mismatch {
            constituents: vec![Constituent::Action]
        }
    );
}

#[test]
fn unknown_object_is_object_mismatch() {
    assert_eq!(
        resolve_on("Tap the zebra", "Main"),
        Resolution::Mismatch {
            constituents: vec![Constituent::Object]
        }
    );
}

#[test]
fn back_and_backup_are_distinguished() {
    assert_eq!(
        resolved("Tap the back button", "Settings").0,
        EventKind::TapBack
    );
    assert_eq!(resolved("Go back", "Settings").0, EventKind::TapBack);
    let cfg = MatchConfig::default();
    assert!(is_back(&terms("back key"), &cfg));
    assert!(!is_back(&terms("back up"), &cfg));
    assert!(!is_back(&terms("back up to sd card"), &cfg));
}

#[test]
fn synonym_substitution() {
    // "restore backup" scores 0.4 against "Restore from backup" and 0.5
    // against "Back up to SD card" once "backup" reads "back up".
    assert_eq!(
        resolved("Restore the backup", "MainMenu").1.as_deref(),
        Some("menu_export_sd")
    );
    assert_eq!(
        resolved("Tap the colour button", "Settings").1.as_deref(),
        Some("btn_color")
    );
}

#[test]
fn unlisted_verb_uses_component_flags() {
    assert_eq!(
        resolved("Add an entry", "Main"),
        (EventKind::Tap, Some("btn_add".into()), None)
    );
}

#[test]
fn multi_group_verbs() {
    assert_eq!(
        resolved("Change the price", "CreateEntry").0,
        EventKind::Type
    );
    assert_eq!(
        resolved("Switch to landscape", "Main").0,
        EventKind::RotateLandscape
    );
    assert_eq!(
        resolved("Toggle autocomplete", "Settings").1.as_deref(),
        Some("chk_autocomplete")
    );
}

#[test]
fn directional_gestures() {
    assert_eq!(resolved("Swipe down", "Main").0, EventKind::SwipeDown);
    assert_eq!(resolved("Scroll the list", "Main").0, EventKind::SwipeUp);
    assert_eq!(
        resolved("Rotate the phone", "Main").0,
        EventKind::RotateLandscape
    );
}

#[test]
fn long_tap() {
    assert_eq!(
        resolved("Long-press the delete button", "EntryDetail"),
        (EventKind::LongTap, Some("btn_delete".into()), None)
    );
}

#[test]
fn generic_input_words_take_the_counter() {
    let m = model();
    let s = m.screen("CreateEntry").unwrap();
    match resolve_step(
        &step("Enter some text in the description"),
        s,
        &cfg(&m),
        &InputCounter::default(),
    ) {
        Resolution::Resolved(r) => {
            assert_eq!(r.component.as_deref(), Some("field_description"));
            assert_eq!(r.input.as_deref(), Some("1"));
            assert!(r.generated_input);
        }
        other => panic!("{other:?}"),
    }
}
