//! Tile a large image with overlapping windows and crop its annotations.
//! An object is kept by a window only if its center lies inside it.
//!
//! cargo run --example crop_tiles -- [overlap]

use centerbox::augment::{crop_annotations, plan_tiles, CropWindow};
use centerbox::simdet::{generate_scene, ObjectCount, SceneConfig};

fn main() -> centerbox::Result<()> {
    let overlap: f64 = std::env::args().nth(1).map_or(100.0, |s| s.parse().expect("overlap"));
    let scene = SceneConfig {
        image_extent: (2048.0, 1536.0),
        n_objects: ObjectCount::Count(120),
        seed: 3,
        ..SceneConfig::default()
    };
    let gts = generate_scene(&scene, 1)?;

    let tiles = plan_tiles(scene.image_extent, (640.0, 640.0), overlap)?;
    println!("{} objects, {} tiles of 640 x 640, overlap {overlap}", gts.len(), tiles.len());
    for t in &tiles {
        let kept = crop_annotations(&gts, t, true);
        let whole = kept.iter().filter(|g| g.bbox.width == 100.0 && g.bbox.height == 100.0).count();
        println!(
            "  x {:>6.1}..{:<6.1} y {:>6.1}..{:<6.1}  {:>3} objects, {:>3} with full boxes",
            t.x_min,
            t.x_max,
            t.y_min,
            t.y_max,
            kept.len(),
            whole
        );
    }

    let window = CropWindow::new(100.0, 612.0, 100.0, 612.0)?;
    let kept = crop_annotations(&gts, &window, false);
    if let Some(g) = kept.first() {
        println!(
            "single window: {} objects; first center in window frame ({:.2}, {:.2})",
            kept.len(),
            g.center.x,
            g.center.y
        );
    }
    Ok(())
}
