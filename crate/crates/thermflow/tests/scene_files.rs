//! The shipped scene files must stay in lockstep with the builtin scenes.

use std::fs;
use std::path::PathBuf;
use thermflow::scene;

fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

#[test]
fn shipped_scene_files_parse_to_the_builtins() {
    for name in scene::BUILTIN_NAMES {
        let path = scenes_dir().join(format!("{name}.scene"));
        let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let parsed = scene::parse_scene(&text).unwrap_or_else(|e| panic!("{name}.scene: {e}"));
        assert_eq!(parsed, scene::builtin(name).unwrap(), "{name}.scene drifted");
    }
}

#[test]
fn serializer_round_trips_the_shipped_scenes() {
    for name in scene::BUILTIN_NAMES {
        let def = scene::builtin(name).unwrap();
        let reparsed = scene::parse_scene(&def.to_text()).unwrap();
        assert_eq!(def, reparsed, "{name}");
    }
}
