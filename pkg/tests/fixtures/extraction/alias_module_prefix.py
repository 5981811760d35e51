from tensorflow.keras import layers as L, models

model = models.Sequential([
    L.Conv2D(8, 3, activation="relu", input_shape=(28, 28, 1)),
    L.MaxPooling2D((2, 2)),
    L.Dropout(0.25),
    L.Flatten(),
    L.Dense(10, activation="softmax"),
])
model.compile(optimizer="adam", loss="categorical_crossentropy")
